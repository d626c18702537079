#include "darkstates/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "darkstates/errors.hpp"
#include "darkstates/states.hpp"

namespace darkstates {

namespace {

Ket random_site(int levels, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Ket v(levels);
  for (int s = 0; s < levels; ++s) v(s) = cplx(normal(rng), normal(rng));
  return v.normalized();
}

// Contraction of psi with conj(a_k) on every site except `site`.
Ket environment(const PureState& psi, const std::vector<Ket>& sites, int site) {
  const int atoms = psi.atoms();
  const int levels = psi.levels();
  Ket out = Ket::Zero(levels);
  for (Eigen::Index n = 0; n < psi.dim(); ++n) {
    const cplx amp = psi[n];
    if (amp == cplx(0.0, 0.0)) continue;
    cplx w = amp;
    std::size_t rem = static_cast<std::size_t>(n);
    int own = 0;
    for (int a = atoms - 1; a >= 0; --a) {
      const int s = static_cast<int>(rem % static_cast<std::size_t>(levels));
      rem /= static_cast<std::size_t>(levels);
      if (a == site)
        own = s;
      else
        w *= std::conj(sites[static_cast<std::size_t>(a)](s));
    }
    out(own) += w;
  }
  return out;
}

}  // namespace

double product_overlap(const PureState& psi, std::span<const Ket> sites) {
  if (static_cast<int>(sites.size()) != psi.atoms()) throw InvalidArgument("product_overlap: one vector per atom");
  Ket prod = sites[0];
  for (std::size_t a = 1; a < sites.size(); ++a) prod = kron(prod, sites[a]);
  return std::norm(prod.dot(psi.amplitudes()));
}

GeometricMeasure geometric_measure(const PureState& psi, const GeometricMeasureOptions& options) {
  if (options.restarts < 1) throw InvalidArgument("geometric_measure needs at least one restart");
  const int atoms = psi.atoms();
  GeometricMeasure best;
  best.maximizer.overlap = -1.0;

  for (int r = 0; r < options.restarts; ++r) {
    std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(r) * 0x9E3779B97F4A7C15ULL);
    std::vector<Ket> sites;
    for (int a = 0; a < atoms; ++a) sites.push_back(random_site(psi.levels(), rng));

    double amplitude = 0.0;
    bool converged = false;
    for (int it = 0; it < options.max_iterations; ++it) {
      const double previous = amplitude;
      for (int a = 0; a < atoms; ++a) {
        const Ket env = environment(psi, sites, a);
        amplitude = env.norm();
        // A vanishing environment leaves the site where it is.
        if (amplitude > 0.0) sites[static_cast<std::size_t>(a)] = env / amplitude;
      }
      if (it > 0 && amplitude * amplitude - previous * previous < options.iter_tol) {
        converged = true;
        break;
      }
    }
    const double ov = amplitude * amplitude;
    if (ov > best.maximizer.overlap) {
      best.maximizer.overlap = ov;
      best.maximizer.sites = sites;
      best.converged = converged;
    }
  }
  best.maximizer.overlap = std::min(best.maximizer.overlap, 1.0);
  best.value = 1.0 - best.maximizer.overlap;
  return best;
}

double witness_expectation(const DensityMatrix& rho, int n) {
  if (n < 2 || rho.atoms() != n || rho.levels() != n)
    throw InvalidArgument("witness_expectation: needs an N-atom, N-level density matrix");
  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;
  const PureState dark = antisymmetric_dark_state(n);
  const Ket& v = dark.amplitudes();
  return rho.trace().real() / factorial - v.dot(rho.matrix() * v).real();
}

Operator partial_transpose(const DensityMatrix& rho, std::span<const int> subset) {
  const int atoms = rho.atoms();
  const int levels = rho.levels();
  std::vector<bool> flip(static_cast<std::size_t>(atoms), false);
  for (int a : subset) {
    if (a < 0 || a >= atoms) throw InvalidArgument("partial_transpose: atom index out of range");
    flip[static_cast<std::size_t>(a)] = true;
  }
  const Eigen::Index dim = rho.dim();
  Operator out(dim, dim);
  std::vector<int> rd, cd;
  for (Eigen::Index r = 0; r < dim; ++r) {
    rd = digits_of(static_cast<std::size_t>(r), atoms, levels);
    for (Eigen::Index c = 0; c < dim; ++c) {
      cd = digits_of(static_cast<std::size_t>(c), atoms, levels);
      for (int a = 0; a < atoms; ++a)
        if (flip[static_cast<std::size_t>(a)]) std::swap(rd[static_cast<std::size_t>(a)], cd[static_cast<std::size_t>(a)]);
      out(static_cast<Eigen::Index>(index_of(rd, levels)), static_cast<Eigen::Index>(index_of(cd, levels))) =
          rho.matrix()(r, c);
      for (int a = 0; a < atoms; ++a)
        if (flip[static_cast<std::size_t>(a)]) std::swap(rd[static_cast<std::size_t>(a)], cd[static_cast<std::size_t>(a)]);
    }
  }
  return out;
}

double negativity(const DensityMatrix& rho, std::span<const int> subset) {
  std::vector<int> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.empty() || static_cast<int>(sorted.size()) >= rho.atoms())
    throw InvalidArgument("negativity: bipartition must be nontrivial");
  const Operator pt = partial_transpose(rho, sorted);
  Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (pt + pt.adjoint()), Eigen::EigenvaluesOnly);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()(k) < 0.0) sum -= es.eigenvalues()(k);
  return sum;
}

Ket apply_product_operator(const PureState& psi, const Eigen::MatrixXcd& s) {
  if (s.rows() != psi.levels() || s.cols() != psi.levels())
    throw InvalidArgument("operator must be d x d for a d-level register");
  Ket v = psi.amplitudes();
  for (int a = 0; a < psi.atoms(); ++a) apply_local(v, psi.atoms(), psi.levels(), a, s);
  return v;
}

GlInvariance gl_invariance_check(const PureState& psi, const Eigen::MatrixXcd& s, double threshold) {
  if (s.rows() != psi.levels() || s.cols() != psi.levels())
    throw InvalidArgument("gl_invariance_check: S must be d x d");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) >= 1e8)
    throw InvalidArgument("gl_invariance_check: S is singular or ill-conditioned");

  const Ket image = apply_product_operator(psi, s);
  const Ket& v = psi.amplitudes();
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);

  GlInvariance out;
  out.factor = image(k) / v(k);
  const double norm = image.norm();
  if (norm == 0.0) return out;
  const cplx ratio = image(k) / norm / v(k);
  const cplx phase = ratio / std::abs(ratio);
  out.residual = (image / norm - phase * v).norm();
  out.proportional = out.residual < threshold;
  return out;
}

LossCertificate persistence_under_loss(const PureState& psi, std::span<const int> lost) {
  const int atoms = psi.atoms();
  std::vector<bool> gone(static_cast<std::size_t>(atoms), false);
  for (int a : lost) {
    if (a < 0 || a >= atoms) throw InvalidArgument("persistence_under_loss: atom index out of range");
    gone[static_cast<std::size_t>(a)] = true;
  }
  LossCertificate cert;
  for (int a = 0; a < atoms; ++a)
    if (!gone[static_cast<std::size_t>(a)]) cert.remaining.push_back(a);
  const int kept = static_cast<int>(cert.remaining.size());
  if (kept < 2) throw InvalidArgument("persistence_under_loss: fewer than two atoms remain");

  const DensityMatrix reduced = partial_trace(DensityMatrix(psi), cert.remaining);
  // Each bipartition once: the side containing the first surviving atom.
  for (unsigned mask = 1; mask < (1u << kept) - 1; ++mask) {
    if (!(mask & 1u)) continue;
    std::vector<int> local, original;
    for (int b = 0; b < kept; ++b)
      if (mask & (1u << b)) {
        local.push_back(b);
        original.push_back(cert.remaining[static_cast<std::size_t>(b)]);
      }
    const double n = negativity(reduced, local);
    cert.bipartitions.push_back({original, n});
    if (n > 1e-12) cert.entangled = true;
  }
  return cert;
}

}  // namespace darkstates
