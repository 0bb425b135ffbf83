#include "colchain/mps.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>

#include "colchain/errors.hpp"

#ifdef COLCHAIN_HAVE_LAPACKE
#include <lapacke.h>
#endif

namespace colchain {

namespace {

using Stride = Eigen::OuterStride<>;
using ConstSlice = Eigen::Map<const RowMajorCMatrix, 0, Stride>;

// Dl x Dr matrix for physical index s
ConstSlice slice(const Tensor3& t, std::size_t s) {
    return {t.data.data() + s * t.Dr, static_cast<Eigen::Index>(t.Dl), static_cast<Eigen::Index>(t.Dr),
            Stride(static_cast<Eigen::Index>(t.d * t.Dr))};
}

struct Svd {
    CMatrix U;
    Eigen::VectorXd s;
    CMatrix Vh;
};

// Thin SVD; LAPACK divide-and-conquer when available, Eigen otherwise
Svd thin_svd(const CMatrix& m) {
    Svd out;
#ifdef COLCHAIN_HAVE_LAPACKE
    const lapack_int rows = static_cast<lapack_int>(m.rows());
    const lapack_int cols = static_cast<lapack_int>(m.cols());
    const lapack_int k = std::min(rows, cols);
    CMatrix a = m;
    out.s.resize(k);
    out.U.resize(rows, k);
    out.Vh.resize(k, cols);
    const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', rows, cols,
                                           reinterpret_cast<lapack_complex_double*>(a.data()), rows,
                                           out.s.data(), reinterpret_cast<lapack_complex_double*>(out.U.data()),
                                           rows, reinterpret_cast<lapack_complex_double*>(out.Vh.data()), k);
    if (info == 0) return out;
#endif
    Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.U = svd.matrixU();
    out.s = svd.singularValues();
    out.Vh = svd.matrixV().adjoint();
    return out;
}

template <typename T>
void write_pod(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw ConfigError("truncated MPS checkpoint");
    return value;
}

}  // namespace

void TruncationPolicy::validate() const {
    if (max_bond < 1) throw ConfigError("max_bond must be at least 1");
    if (!(svd_cutoff >= 0.0 && svd_cutoff < 1.0)) throw ConfigError("svd_cutoff must lie in [0, 1)");
}

MPSState MPSState::product(const std::vector<CVector>& local_states) {
    if (local_states.empty()) throw StructuralError("an MPS needs at least one site");
    MPSState psi;
    psi.sites_.reserve(local_states.size());
    for (const auto& v : local_states) {
        if (v.size() == 0) throw StructuralError("local state with zero dimension");
        Tensor3 t(1, static_cast<std::size_t>(v.size()), 1);
        for (Eigen::Index s = 0; s < v.size(); ++s) t(0, static_cast<std::size_t>(s), 0) = v(s);
        psi.sites_.push_back(std::move(t));
    }
    // Normalize sites away from the center so the canonical conditions hold
    for (std::size_t i = 1; i < psi.sites_.size(); ++i) {
        auto& t = psi.sites_[i];
        double n2 = 0.0;
        for (const auto& x : t.data) n2 += std::norm(x);
        if (n2 == 0.0) throw StructuralError("zero local state");
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& x : t.data) x *= inv;
        for (auto& x : psi.sites_[0].data) x *= std::sqrt(n2);
    }
    psi.center_ = 0;
    return psi;
}

std::vector<std::size_t> MPSState::local_dims() const {
    std::vector<std::size_t> out;
    out.reserve(sites_.size());
    for (const auto& t : sites_) out.push_back(t.d);
    return out;
}

std::size_t MPSState::max_bond_dim() const {
    std::size_t m = 1;
    for (const auto& t : sites_) m = std::max(m, t.Dr);
    return m;
}

double MPSState::norm() const {
    double n2 = 0.0;
    for (const auto& x : sites_.at(center_).data) n2 += std::norm(x);
    return std::sqrt(n2);
}

void MPSState::check_site(std::size_t site) const {
    if (site >= sites_.size()) throw StructuralError("site index out of range");
}

void MPSState::shift_center_right() {
    auto& a = sites_[center_];
    auto& b = sites_[center_ + 1];
    const CMatrix m = a.left_matrix();
    const Eigen::Index k = std::min(m.rows(), m.cols());
    Eigen::HouseholderQR<CMatrix> qr(m);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(m.rows(), k);
    const CMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Tensor3 na(a.Dl, a.d, static_cast<std::size_t>(k));
    na.left_matrix() = q;
    Tensor3 nb(static_cast<std::size_t>(k), b.d, b.Dr);
    nb.right_matrix() = r * b.right_matrix();
    a = std::move(na);
    b = std::move(nb);
    ++center_;
}

void MPSState::shift_center_left() {
    auto& a = sites_[center_ - 1];
    auto& b = sites_[center_];
    const CMatrix m = b.right_matrix().adjoint();
    const Eigen::Index k = std::min(m.rows(), m.cols());
    Eigen::HouseholderQR<CMatrix> qr(m);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(m.rows(), k);
    const CMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Tensor3 nb(static_cast<std::size_t>(k), b.d, b.Dr);
    nb.right_matrix() = q.adjoint();
    Tensor3 na(a.Dl, a.d, static_cast<std::size_t>(k));
    na.left_matrix() = a.left_matrix() * r.adjoint();
    a = std::move(na);
    b = std::move(nb);
    --center_;
}

void MPSState::move_center(std::size_t site) {
    check_site(site);
    while (center_ < site) shift_center_right();
    while (center_ > site) shift_center_left();
}

void MPSState::apply_local(std::size_t site, const CMatrix& op) {
    check_site(site);
    auto& t = sites_[site];
    if (static_cast<std::size_t>(op.rows()) != t.d || static_cast<std::size_t>(op.cols()) != t.d) {
        throw StructuralError("local operator dimension does not match the site");
    }
    move_center(site);
    Tensor3 out(t.Dl, t.d, t.Dr);
    for (std::size_t l = 0; l < t.Dl; ++l) {
        for (std::size_t s = 0; s < t.d; ++s) {
            for (std::size_t s2 = 0; s2 < t.d; ++s2) {
                const cplx o = op(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s2));
                if (o == cplx{}) continue;
                for (std::size_t r = 0; r < t.Dr; ++r) out(l, s, r) += o * t(l, s2, r);
            }
        }
    }
    t = std::move(out);
}

GateReport MPSState::apply_gate(const TwoSiteGate& gate, const TruncationPolicy& policy, CenterMove move) {
    policy.validate();
    const std::size_t i = gate.site;
    if (i + 1 >= sites_.size()) throw StructuralError("two-site gate beyond the last bond");
    const std::size_t d1 = sites_[i].d;
    const std::size_t d2 = sites_[i + 1].d;
    const std::size_t od1 = gate.out_d1 ? gate.out_d1 : d1;
    const std::size_t od2 = gate.out_d2 ? gate.out_d2 : d2;
    const auto dd = static_cast<Eigen::Index>(d1 * d2);
    if (gate.matrix.cols() != dd || gate.matrix.rows() != static_cast<Eigen::Index>(od1 * od2) ||
        od1 * od2 != d1 * d2) {
        throw StructuralError("gate dimension does not match the local dimensions");
    }
    if (center_ < i) move_center(i);
    if (center_ > i + 1) move_center(i + 1);

    const std::size_t Dl = sites_[i].Dl;
    const std::size_t Dr = sites_[i + 1].Dr;
    // theta[(l, s1), (s2, r)]
    const RowMajorCMatrix theta = sites_[i].left_matrix() * sites_[i + 1].right_matrix();

    // Gate acts on the (s1, s2) index for every (l, r)
    CMatrix x(dd, static_cast<Eigen::Index>(Dl * Dr));
    for (std::size_t l = 0; l < Dl; ++l) {
        for (std::size_t s1 = 0; s1 < d1; ++s1) {
            for (std::size_t s2 = 0; s2 < d2; ++s2) {
                for (std::size_t r = 0; r < Dr; ++r) {
                    x(static_cast<Eigen::Index>(s1 * d2 + s2), static_cast<Eigen::Index>(l * Dr + r)) =
                        theta(static_cast<Eigen::Index>(l * d1 + s1), static_cast<Eigen::Index>(s2 * Dr + r));
                }
            }
        }
    }
    const CMatrix y = gate.matrix * x;
    CMatrix m(static_cast<Eigen::Index>(Dl * od1), static_cast<Eigen::Index>(od2 * Dr));
    for (std::size_t l = 0; l < Dl; ++l) {
        for (std::size_t s1 = 0; s1 < od1; ++s1) {
            for (std::size_t s2 = 0; s2 < od2; ++s2) {
                for (std::size_t r = 0; r < Dr; ++r) {
                    m(static_cast<Eigen::Index>(l * od1 + s1), static_cast<Eigen::Index>(s2 * Dr + r)) =
                        y(static_cast<Eigen::Index>(s1 * od2 + s2), static_cast<Eigen::Index>(l * Dr + r));
                }
            }
        }
    }

    const Svd svd = thin_svd(m);
    const Eigen::VectorXd& sv = svd.s;
    const double s0 = sv.size() > 0 ? sv(0) : 0.0;
    std::size_t keep = 0;
    while (keep < static_cast<std::size_t>(sv.size()) && keep < policy.max_bond &&
           sv(static_cast<Eigen::Index>(keep)) > policy.svd_cutoff * s0) {
        ++keep;
    }
    keep = std::max<std::size_t>(keep, 1);
    GateReport report;
    report.bond = i;
    for (Eigen::Index k = static_cast<Eigen::Index>(keep); k < sv.size(); ++k) report.discarded += sv(k) * sv(k);
    discarded_ += report.discarded;

    const auto kk = static_cast<Eigen::Index>(keep);
    Tensor3 a(Dl, od1, keep);
    Tensor3 b(keep, od2, Dr);
    if (move == CenterMove::Right) {
        a.left_matrix() = svd.U.leftCols(kk);
        b.right_matrix() = sv.head(kk).asDiagonal() * svd.Vh.topRows(kk);
        center_ = i + 1;
    } else {
        a.left_matrix() = svd.U.leftCols(kk) * sv.head(kk).asDiagonal();
        b.right_matrix() = svd.Vh.topRows(kk);
        center_ = i;
    }
    sites_[i] = std::move(a);
    sites_[i + 1] = std::move(b);
    return report;
}

cplx MPSState::expectation_local(std::size_t site, const CMatrix& op) const {
    check_site(site);
    const Tensor3& t = sites_[site];
    if (static_cast<std::size_t>(op.rows()) != t.d || static_cast<std::size_t>(op.cols()) != t.d) {
        throw StructuralError("local operator dimension does not match the site");
    }
    const double n2 = norm() * norm();
    if (n2 == 0.0) throw StructuralError("expectation value of a zero state");

    if (site <= center_) {
        // E[r, r'] = sum conj(T(l, s, r)) op(s, s') T(l, s', r'); left of `site` is left-isometric
        CMatrix env = CMatrix::Zero(static_cast<Eigen::Index>(t.Dr), static_cast<Eigen::Index>(t.Dr));
        for (std::size_t s = 0; s < t.d; ++s) {
            for (std::size_t s2 = 0; s2 < t.d; ++s2) {
                const cplx o = op(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s2));
                if (o == cplx{}) continue;
                env.noalias() += o * slice(t, s).adjoint() * slice(t, s2);
            }
        }
        for (std::size_t k = site + 1; k <= center_; ++k) {
            const Tensor3& a = sites_[k];
            CMatrix next = CMatrix::Zero(static_cast<Eigen::Index>(a.Dr), static_cast<Eigen::Index>(a.Dr));
            for (std::size_t s = 0; s < a.d; ++s) next.noalias() += slice(a, s).adjoint() * env * slice(a, s);
            env = std::move(next);
        }
        return env.trace() / n2;
    }
    // Mirror image: contract from `site` leftward to the center
    CMatrix env = CMatrix::Zero(static_cast<Eigen::Index>(t.Dl), static_cast<Eigen::Index>(t.Dl));
    for (std::size_t s = 0; s < t.d; ++s) {
        for (std::size_t s2 = 0; s2 < t.d; ++s2) {
            const cplx o = op(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s2));
            if (o == cplx{}) continue;
            env.noalias() += o * slice(t, s2) * slice(t, s).adjoint();
        }
    }
    for (std::size_t k = site; k-- > center_;) {
        const Tensor3& a = sites_[k];
        CMatrix next = CMatrix::Zero(static_cast<Eigen::Index>(a.Dl), static_cast<Eigen::Index>(a.Dl));
        for (std::size_t s = 0; s < a.d; ++s) next.noalias() += slice(a, s) * env * slice(a, s).adjoint();
        env = std::move(next);
    }
    return env.trace() / n2;
}

void MPSState::swap_to(std::size_t from, std::size_t to, const TruncationPolicy& policy) {
    check_site(from);
    check_site(to);
    if (from == to) return;
    move_center(from);
    std::size_t pos = from;
    while (pos < to) {
        apply_gate(swap_gate(pos, sites_[pos].d, sites_[pos + 1].d), policy, CenterMove::Right);
        ++pos;
    }
    while (pos > to) {
        apply_gate(swap_gate(pos - 1, sites_[pos - 1].d, sites_[pos].d), policy, CenterMove::Left);
        --pos;
    }
}

CVector MPSState::to_dense() const {
    RowMajorCMatrix psi = sites_.front().left_matrix();  // d0 x D
    for (std::size_t k = 1; k < sites_.size(); ++k) {
        const Tensor3& t = sites_[k];
        RowMajorCMatrix next = psi * t.right_matrix();  // P x (d Dr)
        psi = Eigen::Map<RowMajorCMatrix>(next.data(), next.rows() * static_cast<Eigen::Index>(t.d),
                                          static_cast<Eigen::Index>(t.Dr));
    }
    return Eigen::Map<CVector>(psi.data(), psi.size());
}

bool MPSState::is_canonical(double tol) const {
    for (std::size_t k = 0; k < sites_.size(); ++k) {
        if (k == center_) continue;
        const Tensor3& t = sites_[k];
        if (k < center_) {
            const CMatrix g = t.left_matrix().adjoint() * t.left_matrix();
            if ((g - CMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() > tol) return false;
        } else {
            const CMatrix g = t.right_matrix() * t.right_matrix().adjoint();
            if ((g - CMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() > tol) return false;
        }
    }
    return true;
}

void MPSState::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write MPS checkpoint " + path.string());
    write_pod<std::uint64_t>(out, sites_.size());
    write_pod<std::uint64_t>(out, center_);
    write_pod<double>(out, discarded_);
    for (const auto& t : sites_) {
        write_pod<std::uint64_t>(out, t.Dl);
        write_pod<std::uint64_t>(out, t.d);
        write_pod<std::uint64_t>(out, t.Dr);
        for (const auto& x : t.data) {
            write_pod<double>(out, x.real());
            write_pod<double>(out, x.imag());
        }
    }
    if (!out) throw ConfigError("failed writing MPS checkpoint " + path.string());
}

MPSState MPSState::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open MPS checkpoint " + path.string());
    MPSState psi;
    const auto n = read_pod<std::uint64_t>(in);
    psi.center_ = read_pod<std::uint64_t>(in);
    psi.discarded_ = read_pod<double>(in);
    if (n == 0 || psi.center_ >= n) throw ConfigError("corrupt MPS checkpoint header");
    for (std::uint64_t k = 0; k < n; ++k) {
        const auto dl = read_pod<std::uint64_t>(in);
        const auto d = read_pod<std::uint64_t>(in);
        const auto dr = read_pod<std::uint64_t>(in);
        if (dl == 0 || d == 0 || dr == 0 || dl * d * dr > (1ULL << 32)) {
            throw ConfigError("corrupt MPS checkpoint tensor shape");
        }
        if (!psi.sites_.empty() && psi.sites_.back().Dr != dl) throw ConfigError("checkpoint bond mismatch");
        Tensor3 t(dl, d, dr);
        for (auto& x : t.data) {
            const double re = read_pod<double>(in);
            const double im = read_pod<double>(in);
            x = {re, im};
        }
        psi.sites_.push_back(std::move(t));
    }
    if (psi.sites_.front().Dl != 1 || psi.sites_.back().Dr != 1) throw ConfigError("checkpoint boundary bonds");
    return psi;
}

TwoSiteGate swap_gate(std::size_t site, std::size_t d1, std::size_t d2) {
    return fused_swap_gate(site, d1, d2, CMatrix::Identity(static_cast<Eigen::Index>(d1 * d2),
                                                            static_cast<Eigen::Index>(d1 * d2)));
}

TwoSiteGate fused_swap_gate(std::size_t site, std::size_t d1, std::size_t d2, const CMatrix& u) {
    const auto dd = static_cast<Eigen::Index>(d1 * d2);
    if (u.rows() != dd || u.cols() != dd) throw StructuralError("gate dimension does not match the local dimensions");
    CMatrix p = CMatrix::Zero(dd, dd);
    for (std::size_t s1 = 0; s1 < d1; ++s1) {
        for (std::size_t s2 = 0; s2 < d2; ++s2) {
            p(static_cast<Eigen::Index>(s2 * d1 + s1), static_cast<Eigen::Index>(s1 * d2 + s2)) = 1.0;
        }
    }
    return {site, p * u, d2, d1};
}

CMatrix expm_hermitian(const CMatrix& h, double tau) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const Eigen::VectorXd& ev = es.eigenvalues();
    CVector phase(ev.size());
    for (Eigen::Index k = 0; k < ev.size(); ++k) phase(k) = std::polar(1.0, -ev(k) * tau);
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

bool is_unitary(const CMatrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    return ((u.adjoint() * u) - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

MPSState apply_gate(MPSState state, const TwoSiteGate& gate, const TruncationPolicy& policy) {
    state.apply_gate(gate, policy);
    return state;
}

MPSState swap_to(MPSState state, std::size_t from, std::size_t to, const TruncationPolicy& policy) {
    state.swap_to(from, to, policy);
    return state;
}

cplx expectation_local(const MPSState& state, std::size_t site, const CMatrix& op) {
    return state.expectation_local(site, op);
}

}  // namespace colchain
