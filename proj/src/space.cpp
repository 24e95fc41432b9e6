#include "fbl/space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fbl/errors.hpp"
#include "fbl/lp.hpp"

namespace fbl {

namespace {

constexpr std::size_t kMaxExtremePoints = 1u << 16;
constexpr double kSymmetryTol = 1e-9;

double conjugate(double p) {
  if (p == 1.0) return kInfinity;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

double lp_norm(const Vec& x, double p) {
  if (x.size() == 0) return 0.0;
  if (p == 1.0) return x.lpNorm<1>();
  if (p == 2.0) return x.norm();
  if (std::isinf(p)) return x.lpNorm<Eigen::Infinity>();
  const double scale = x.lpNorm<Eigen::Infinity>();
  if (scale == 0.0) return 0.0;
  return scale * std::pow((x / scale).array().abs().pow(p).sum(), 1.0 / p);
}

std::string format_vector(const Vec& v) {
  std::ostringstream os;
  os << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v(i);
  }
  os << ']';
  return os.str();
}

// x in the l_p unit ball with <g, x> = ||g||_q.
Vec lp_norming(const Vec& g, double p) {
  const Eigen::Index n = g.size();
  Vec x = Vec::Zero(n);
  if (n == 0 || g.lpNorm<Eigen::Infinity>() == 0.0) return x;
  if (p == 1.0) {
    Eigen::Index j = 0;
    g.cwiseAbs().maxCoeff(&j);
    x(j) = g(j) > 0 ? 1.0 : -1.0;
    return x;
  }
  if (std::isinf(p)) {
    for (Eigen::Index i = 0; i < n; ++i) x(i) = g(i) >= 0 ? 1.0 : -1.0;
    return x;
  }
  const double q = conjugate(p);
  const double gq = lp_norm(g, q);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(g(i)) / gq;
    x(i) = std::copysign(std::pow(a, q - 1.0), g(i));
  }
  return x;
}

}  // namespace

struct Space::Data {
  NormKind kind = NormKind::kPNorm;
  int dim = 0;
  double p = 1.0;
  Vec weights;
  Eigen::MatrixXd vertices;
  std::vector<Space> parts;
  std::vector<int> offsets;
  std::optional<Eigen::MatrixXd> extreme;
  double dual_sup_lower = 1.0;
};

Space::Space(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

namespace {

std::optional<Eigen::MatrixXd> sign_vectors(int n) {
  if (n > 16) return std::nullopt;
  const std::size_t count = std::size_t{1} << n;
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(count));
  for (std::size_t s = 0; s < count; ++s) {
    for (int i = 0; i < n; ++i) {
      out(i, static_cast<Eigen::Index>(s)) = (s >> i) & 1u ? -1.0 : 1.0;
    }
  }
  return out;
}

Eigen::MatrixXd signed_axes(const Vec& scale) {
  const Eigen::Index n = scale.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, 2 * i) = scale(i);
    out(i, 2 * i + 1) = -scale(i);
  }
  return out;
}

double max_unit_vector_norm(const Space& s) {
  double worst = 0.0;
  for (int j = 0; j < s.dim(); ++j) {
    worst = std::max(worst, s.primal_norm(Vec::Unit(s.dim(), j)));
  }
  return worst;
}

}  // namespace

Space Space::lp(int dim, double p) {
  if (dim < 1) throw ValidationError("space dimension must be positive");
  if (!(p >= 1.0)) throw ValidationError("p-norm exponent must lie in [1, inf]");
  auto d = std::make_shared<Data>();
  d->kind = NormKind::kPNorm;
  d->dim = dim;
  d->p = p;
  if (dim == 1) {
    d->extreme = signed_axes(Vec::Ones(1));
  } else if (p == 1.0) {
    d->extreme = signed_axes(Vec::Ones(dim));
  } else if (std::isinf(p)) {
    d->extreme = sign_vectors(dim);
  }
  d->dual_sup_lower = 1.0;
  return Space(std::move(d));
}

Space Space::weighted_l1(Vec weights) {
  if (weights.size() < 1) throw ValidationError("weighted l1 needs at least one weight");
  if (!(weights.minCoeff() > 0.0) || !weights.allFinite()) {
    throw ValidationError("weighted l1 weights must be positive and finite");
  }
  auto d = std::make_shared<Data>();
  d->kind = NormKind::kWeightedL1;
  d->dim = static_cast<int>(weights.size());
  d->extreme = signed_axes(weights.cwiseInverse());
  d->dual_sup_lower = weights.minCoeff();
  d->weights = std::move(weights);
  return Space(std::move(d));
}

Space Space::polytope(Eigen::MatrixXd vertices) {
  const auto n = vertices.rows();
  if (n < 1 || vertices.cols() < 1) throw ValidationError("polytope needs vertices");
  if (!vertices.allFinite()) throw ValidationError("polytope vertices must be finite");
  for (Eigen::Index j = 0; j < vertices.cols(); ++j) {
    bool found = false;
    for (Eigen::Index i = 0; i < vertices.cols() && !found; ++i) {
      found = (vertices.col(i) + vertices.col(j)).lpNorm<Eigen::Infinity>() <= kSymmetryTol;
    }
    if (!found) throw ValidationError("polytope vertex list is not origin-symmetric");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(vertices);
  if (lu.rank() < n) {
    throw ValidationError("polytope vertex list does not span the space (gauge would be infinite)");
  }
  auto d = std::make_shared<Data>();
  d->kind = NormKind::kPolytope;
  d->dim = static_cast<int>(n);
  d->extreme = vertices;
  d->vertices = std::move(vertices);
  Space s(d);
  d->dual_sup_lower = 1.0 / max_unit_vector_norm(s);
  return Space(std::move(d));
}

Space Space::direct_sum(const std::vector<Space>& parts, double p) {
  if (parts.empty()) throw ValidationError("direct sum of an empty list");
  if (!(p >= 1.0)) throw ValidationError("direct-sum exponent must lie in [1, inf]");
  auto d = std::make_shared<Data>();
  d->kind = NormKind::kDirectSum;
  d->p = p;
  d->parts = parts;
  int offset = 0;
  for (const auto& part : parts) {
    d->offsets.push_back(offset);
    offset += part.dim();
  }
  d->dim = offset;

  const bool all_finite = std::all_of(parts.begin(), parts.end(), [](const Space& s) {
    return s.extreme_points().has_value();
  });
  if (all_finite && p == 1.0) {
    Eigen::Index cols = 0;
    for (const auto& part : parts) cols += part.extreme_points()->cols();
    Eigen::MatrixXd ext = Eigen::MatrixXd::Zero(offset, cols);
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto& e = *parts[i].extreme_points();
      ext.block(d->offsets[i], col, e.rows(), e.cols()) = e;
      col += e.cols();
    }
    d->extreme = std::move(ext);
  } else if (all_finite && std::isinf(p)) {
    std::size_t count = 1;
    for (const auto& part : parts) {
      count *= static_cast<std::size_t>(part.extreme_points()->cols());
      if (count > kMaxExtremePoints) break;
    }
    if (count <= kMaxExtremePoints) {
      Eigen::MatrixXd ext(offset, static_cast<Eigen::Index>(count));
      for (std::size_t c = 0; c < count; ++c) {
        std::size_t rest = c;
        for (std::size_t i = 0; i < parts.size(); ++i) {
          const auto& e = *parts[i].extreme_points();
          const auto k = static_cast<std::size_t>(e.cols());
          ext.block(d->offsets[i], static_cast<Eigen::Index>(c), e.rows(), 1) =
              e.col(static_cast<Eigen::Index>(rest % k));
          rest /= k;
        }
      }
      d->extreme = std::move(ext);
    }
  }
  Space s(d);
  d->dual_sup_lower = 1.0 / max_unit_vector_norm(s);
  return Space(std::move(d));
}

int Space::dim() const { return data_->dim; }
NormKind Space::kind() const { return data_->kind; }
double Space::exponent() const { return data_->p; }
const Vec& Space::weights() const { return data_->weights; }
const Eigen::MatrixXd& Space::vertices() const { return data_->vertices; }
const std::vector<Space>& Space::components() const { return data_->parts; }
const std::optional<Eigen::MatrixXd>& Space::extreme_points() const { return data_->extreme; }
double Space::dual_vs_sup_lower() const { return data_->dual_sup_lower; }

void Space::check_dim(const Vec& v, const char* what) const {
  if (v.size() != data_->dim) {
    std::ostringstream os;
    os << what << ": dimension mismatch (expected " << data_->dim << ", got " << v.size() << ")";
    throw ValidationError(os.str());
  }
}

std::string Space::describe() const {
  std::ostringstream os;
  switch (data_->kind) {
    case NormKind::kPNorm:
      if (data_->p == 1.0) {
        os << "l1:" << data_->dim;
      } else if (data_->p == 2.0) {
        os << "l2:" << data_->dim;
      } else if (std::isinf(data_->p)) {
        os << "linf:" << data_->dim;
      } else {
        os << "lp:" << data_->dim << ':' << data_->p;
      }
      break;
    case NormKind::kWeightedL1:
      os << "wl1:" << format_vector(data_->weights);
      break;
    case NormKind::kPolytope:
      os << "polytope:" << data_->dim << ':' << data_->vertices.cols() << "v";
      break;
    case NormKind::kDirectSum:
      os << "sum" << (std::isinf(data_->p) ? std::string("inf") : std::to_string(data_->p)) << '(';
      for (std::size_t i = 0; i < data_->parts.size(); ++i) {
        if (i) os << ',';
        os << data_->parts[i].describe();
      }
      os << ')';
      break;
  }
  return os.str();
}

double Space::primal_norm(const Vec& x) const {
  check_dim(x, "primal_norm");
  const Data& d = *data_;
  switch (d.kind) {
    case NormKind::kPNorm:
      return lp_norm(x, d.p);
    case NormKind::kWeightedL1:
      return d.weights.dot(x.cwiseAbs());
    case NormKind::kPolytope: {
      // Gauge of conv(V) by LP duality: max <f, x> s.t. |<f, v>| <= 1, f free.
      const Eigen::Index n = d.dim;
      const Eigen::Index m = d.vertices.cols();
      Eigen::MatrixXd A(2 * m, 2 * n);
      const Eigen::MatrixXd Vt = d.vertices.transpose();
      A << Vt, -Vt, -Vt, Vt;
      Vec c(2 * n);
      c << x, -x;
      const auto sol = lp::maximize(A, Vec::Ones(2 * m), c, 1e-9);
      if (sol.status != lp::Status::kOptimal) {
        throw ComputationError("polytope gauge LP did not converge");
      }
      return std::max(0.0, sol.objective);
    }
    case NormKind::kDirectSum: {
      Vec norms(static_cast<Eigen::Index>(d.parts.size()));
      for (std::size_t i = 0; i < d.parts.size(); ++i) {
        norms(static_cast<Eigen::Index>(i)) =
            d.parts[i].primal_norm(x.segment(d.offsets[i], d.parts[i].dim()));
      }
      return lp_norm(norms, d.p);
    }
  }
  return 0.0;
}

double Space::dual_norm(const Vec& f) const {
  check_dim(f, "dual_norm");
  const Data& d = *data_;
  switch (d.kind) {
    case NormKind::kPNorm:
      return lp_norm(f, conjugate(d.p));
    case NormKind::kWeightedL1:
      return f.cwiseAbs().cwiseQuotient(d.weights).maxCoeff();
    case NormKind::kPolytope:
      return (d.vertices.transpose() * f).cwiseAbs().maxCoeff();
    case NormKind::kDirectSum: {
      Vec norms(static_cast<Eigen::Index>(d.parts.size()));
      for (std::size_t i = 0; i < d.parts.size(); ++i) {
        norms(static_cast<Eigen::Index>(i)) =
            d.parts[i].dual_norm(f.segment(d.offsets[i], d.parts[i].dim()));
      }
      return lp_norm(norms, conjugate(d.p));
    }
  }
  return 0.0;
}

Vec Space::norming_vector(const Vec& g) const {
  check_dim(g, "norming_vector");
  const Data& d = *data_;
  switch (d.kind) {
    case NormKind::kPNorm:
      return lp_norming(g, d.p);
    case NormKind::kWeightedL1: {
      Eigen::Index j = 0;
      g.cwiseAbs().cwiseQuotient(d.weights).maxCoeff(&j);
      Vec x = Vec::Zero(d.dim);
      x(j) = (g(j) >= 0 ? 1.0 : -1.0) / d.weights(j);
      return x;
    }
    case NormKind::kPolytope: {
      Eigen::Index j = 0;
      (d.vertices.transpose() * g).maxCoeff(&j);
      return d.vertices.col(j);
    }
    case NormKind::kDirectSum: {
      const auto m = static_cast<Eigen::Index>(d.parts.size());
      Vec norms(m);
      std::vector<Vec> local;
      for (std::size_t i = 0; i < d.parts.size(); ++i) {
        const Vec gi = g.segment(d.offsets[i], d.parts[i].dim());
        norms(static_cast<Eigen::Index>(i)) = d.parts[i].dual_norm(gi);
        local.push_back(d.parts[i].norming_vector(gi));
      }
      const Vec t = lp_norming(norms, d.p);
      Vec x = Vec::Zero(d.dim);
      for (std::size_t i = 0; i < d.parts.size(); ++i) {
        x.segment(d.offsets[i], d.parts[i].dim()) = std::abs(t(static_cast<Eigen::Index>(i))) * local[i];
      }
      return x;
    }
  }
  return Vec::Zero(d.dim);
}

bool Space::is_l1_type() const {
  return data_->kind == NormKind::kWeightedL1 ||
         (data_->kind == NormKind::kPNorm && (data_->p == 1.0 || data_->dim == 1));
}

Vec Space::l1_weights() const {
  if (!is_l1_type()) throw ValidationError("space is not of l1 type");
  if (data_->kind == NormKind::kWeightedL1) return data_->weights;
  return Vec::Ones(data_->dim);
}

}  // namespace fbl
