// mps.hpp: Pure-state matrix product states with two-site gates and SVD truncation
//
// Site tensors are stored row-major with index order (left bond, physical, right bond).
// The state is kept in mixed canonical form around a single orthogonality center;
// the center tensor carries the norm.

#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace colchain {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RowMajorCMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Tensor3 {
    std::size_t Dl{1};
    std::size_t d{1};
    std::size_t Dr{1};
    std::vector<cplx> data;

    Tensor3() = default;
    Tensor3(std::size_t dl, std::size_t dim, std::size_t dr) : Dl(dl), d(dim), Dr(dr), data(dl * dim * dr) {}

    cplx& operator()(std::size_t l, std::size_t s, std::size_t r) { return data[(l * d + s) * Dr + r]; }
    cplx operator()(std::size_t l, std::size_t s, std::size_t r) const { return data[(l * d + s) * Dr + r]; }

    // (Dl*d) x Dr and Dl x (d*Dr) views of the same storage
    Eigen::Map<RowMajorCMatrix> left_matrix() {
        return {data.data(), static_cast<Eigen::Index>(Dl * d), static_cast<Eigen::Index>(Dr)};
    }
    Eigen::Map<const RowMajorCMatrix> left_matrix() const {
        return {data.data(), static_cast<Eigen::Index>(Dl * d), static_cast<Eigen::Index>(Dr)};
    }
    Eigen::Map<RowMajorCMatrix> right_matrix() {
        return {data.data(), static_cast<Eigen::Index>(Dl), static_cast<Eigen::Index>(d * Dr)};
    }
    Eigen::Map<const RowMajorCMatrix> right_matrix() const {
        return {data.data(), static_cast<Eigen::Index>(Dl), static_cast<Eigen::Index>(d * Dr)};
    }
};

struct TruncationPolicy {
    std::size_t max_bond{32};
    double svd_cutoff{1e-12};  // relative to the largest singular value

    static TruncationPolicy unbounded() { return {std::numeric_limits<std::size_t>::max(), 0.0}; }
    void validate() const;
};

// Unitary on sites (site, site + 1); basis index s1 * d2 + s2. A gate may permute the
// two physical spaces (SWAP), in which case out_d1/out_d2 give the output dimensions.
struct TwoSiteGate {
    std::size_t site{0};
    CMatrix matrix;
    std::size_t out_d1{0};  // 0: same as input
    std::size_t out_d2{0};
};

enum class CenterMove { Left, Right };

struct GateReport {
    std::size_t bond{0};
    double discarded{0.0};
};

class MPSState {
public:
    MPSState() = default;

    // Product state from one (not necessarily normalized) vector per site.
    static MPSState product(const std::vector<CVector>& local_states);

    std::size_t size() const noexcept { return sites_.size(); }
    std::size_t local_dim(std::size_t site) const { return sites_.at(site).d; }
    std::vector<std::size_t> local_dims() const;
    std::size_t bond_dim(std::size_t bond) const { return sites_.at(bond).Dr; }  // between bond and bond+1
    std::size_t max_bond_dim() const;
    std::size_t ortho_center() const noexcept { return center_; }
    double discarded_weight() const noexcept { return discarded_; }
    double norm() const;
    const Tensor3& tensor(std::size_t site) const { return sites_.at(site); }

    // QR sweeps moving the orthogonality center; exact, no truncation.
    void move_center(std::size_t site);

    // Arbitrary single-site operator, applied at the center (moved there first).
    void apply_local(std::size_t site, const CMatrix& op);

    // Two-site gate with SVD truncation. The center is first brought to the nearer
    // gate site if needed, and ends on the left or right gate site.
    GateReport apply_gate(const TwoSiteGate& gate, const TruncationPolicy& policy,
                          CenterMove move = CenterMove::Right);

    // <psi| op_site |psi> / <psi|psi>
    cplx expectation_local(std::size_t site, const CMatrix& op) const;

    // Move the physical site at `from` to position `to` by adjacent SWAP gates.
    void swap_to(std::size_t from, std::size_t to, const TruncationPolicy& policy);

    // Dense coefficient vector, site 0 most significant. For small systems only.
    CVector to_dense() const;

    // Checks left/right isometry conditions around the center to tol.
    bool is_canonical(double tol = 1e-10) const;

    void save(const std::filesystem::path& path) const;
    static MPSState load(const std::filesystem::path& path);

private:
    void check_site(std::size_t site) const;
    void shift_center_right();
    void shift_center_left();

    std::vector<Tensor3> sites_;
    std::size_t center_{0};
    double discarded_{0.0};
};

TwoSiteGate swap_gate(std::size_t site, std::size_t d1, std::size_t d2);

// SWAP * u: apply u on (site, site + 1), then exchange the two sites.
TwoSiteGate fused_swap_gate(std::size_t site, std::size_t d1, std::size_t d2, const CMatrix& u);

// exp(-i h tau) for Hermitian h
CMatrix expm_hermitian(const CMatrix& h, double tau);

// Kronecker product a (x) b, a acting on the left site.
CMatrix kron(const CMatrix& a, const CMatrix& b);

bool is_unitary(const CMatrix& u, double tol = 1e-12);

// Value-semantics wrappers
MPSState apply_gate(MPSState state, const TwoSiteGate& gate, const TruncationPolicy& policy);
MPSState swap_to(MPSState state, std::size_t from, std::size_t to, const TruncationPolicy& policy);
cplx expectation_local(const MPSState& state, std::size_t site, const CMatrix& op);

}  // namespace colchain
