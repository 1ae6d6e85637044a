#include "usreg/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "usreg/errors.hpp"

namespace usreg {

namespace {

constexpr std::size_t kDim = 6;

ParamVector axpy(const ParamVector& base, double s, const ParamVector& dir) {
  ParamVector r;
  for (std::size_t i = 0; i < kDim; ++i) r[i] = base[i] + s * dir[i];
  return r;
}

double simplex_diameter(const std::vector<ParamVector>& v) {
  double d = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    for (std::size_t k = 0; k < kDim; ++k) {
      d = std::max(d, std::abs(v[i][k] - v[0][k]));
    }
  }
  return d;
}

}  // namespace

void SimplexConfig::validate() const {
  if (!allow_size_outside_range &&
      (initial_size_units < 3.0 || initial_size_units > 5.0)) {
    raise(ErrorCode::invalid_argument,
          "initial simplex size must stay in [3,5] units unless overridden");
  }
  if (reflection <= 0.0 || expansion <= 0.0 || contraction <= 0.0 ||
      shrink <= 0.0) {
    raise(ErrorCode::invalid_argument, "simplex coefficients must be positive");
  }
  if (!(reflection < expansion)) {
    raise(ErrorCode::invalid_argument,
          "reflection coefficient must be below expansion");
  }
  if (max_evals < static_cast<int>(kDim) + 1) {
    raise(ErrorCode::invalid_argument, "max_evals too small for a simplex");
  }
}

namespace detail {

void shrink_toward_best(std::vector<ParamVector>& vertices, std::size_t best,
                        double sigma) {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (i == best) continue;
    for (std::size_t k = 0; k < kDim; ++k) {
      vertices[i][k] =
          vertices[best][k] + sigma * (vertices[i][k] - vertices[best][k]);
    }
  }
}

}  // namespace detail

OptResult minimize(const CostFunction& f, const ParamVector& x0,
                   const SimplexConfig& config, const SimplexObserver& observer) {
  config.validate();

  int evals = 0;
  auto eval = [&](const ParamVector& p) {
    ++evals;
    return f(p);
  };

  // Vertex order: stable sort by cost, ties by insertion index, so the
  // whole trajectory is reproducible.
  struct Vertex {
    ParamVector x;
    double cost;
    int insertion;
  };

  auto run = [&](const ParamVector& start, int eval_budget, OptResult& out) {
    std::vector<Vertex> simplex;
    simplex.reserve(kDim + 1);
    const double f0 = eval(start);
    if (!std::isfinite(f0)) {
      raise(ErrorCode::non_finite_cost,
            "cost is not finite at the initial point");
    }
    int insertion = 0;
    simplex.push_back({start, f0, insertion++});
    for (std::size_t i = 0; i < kDim; ++i) {
      ParamVector p = start;
      p[i] += config.initial_size_units;
      simplex.push_back({p, eval(p), insertion++});
    }

    auto order = [&]() {
      std::stable_sort(simplex.begin(), simplex.end(),
                       [](const Vertex& a, const Vertex& b) {
                         if (a.cost != b.cost) return a.cost < b.cost;
                         return a.insertion < b.insertion;
                       });
    };
    order();

    auto notify = [&](int iter, SimplexStep step) {
      if (!observer) return;
      std::vector<ParamVector> xs(simplex.size());
      std::vector<double> cs(simplex.size());
      for (std::size_t i = 0; i < simplex.size(); ++i) {
        xs[i] = simplex[i].x;
        cs[i] = simplex[i].cost;
      }
      observer(iter, step, xs, cs);
    };
    notify(0, SimplexStep::initial);

    TerminationReason reason = TerminationReason::max_evals;
    int iter = 0;
    while (evals < eval_budget) {
      {
        std::vector<ParamVector> xs(simplex.size());
        for (std::size_t i = 0; i < simplex.size(); ++i) xs[i] = simplex[i].x;
        if (simplex_diameter(xs) <= config.x_tol) {
          reason = TerminationReason::x_tol;
          break;
        }
      }
      if (simplex.back().cost - simplex.front().cost <= config.f_tol) {
        reason = TerminationReason::f_tol;
        break;
      }

      ++iter;
      // Centroid of all but the worst vertex.
      ParamVector centroid{};
      for (std::size_t i = 0; i + 1 < simplex.size(); ++i) {
        for (std::size_t k = 0; k < kDim; ++k) centroid[k] += simplex[i].x[k];
      }
      for (std::size_t k = 0; k < kDim; ++k) {
        centroid[k] /= static_cast<double>(kDim);
      }

      Vertex& worst = simplex.back();
      const double f_best = simplex.front().cost;
      const double f_second_worst = simplex[simplex.size() - 2].cost;

      ParamVector dir;
      for (std::size_t k = 0; k < kDim; ++k) {
        dir[k] = centroid[k] - worst.x[k];
      }

      const ParamVector xr = axpy(centroid, config.reflection, dir);
      const double fr = eval(xr);
      SimplexStep step;

      if (fr < f_best) {
        const ParamVector xe =
            axpy(centroid, config.reflection * config.expansion, dir);
        const double fe = eval(xe);
        if (fe < fr) {
          worst = {xe, fe, insertion++};
          step = SimplexStep::expand;
        } else {
          worst = {xr, fr, insertion++};
          step = SimplexStep::reflect;
        }
      } else if (fr < f_second_worst) {
        worst = {xr, fr, insertion++};
        step = SimplexStep::reflect;
      } else if (fr < worst.cost) {
        const ParamVector xc =
            axpy(centroid, config.reflection * config.contraction, dir);
        const double fc = eval(xc);
        if (fc <= fr) {
          worst = {xc, fc, insertion++};
          step = SimplexStep::contract_outside;
        } else {
          step = SimplexStep::shrink;
        }
      } else {
        const ParamVector xc = axpy(centroid, -config.contraction, dir);
        const double fc = eval(xc);
        if (fc < worst.cost) {
          worst = {xc, fc, insertion++};
          step = SimplexStep::contract_inside;
        } else {
          step = SimplexStep::shrink;
        }
      }

      if (step == SimplexStep::shrink) {
        std::vector<ParamVector> xs(simplex.size());
        for (std::size_t i = 0; i < simplex.size(); ++i) xs[i] = simplex[i].x;
        detail::shrink_toward_best(xs, 0, config.shrink);
        for (std::size_t i = 1; i < simplex.size(); ++i) {
          simplex[i].x = xs[i];
          simplex[i].cost = eval(xs[i]);
          simplex[i].insertion = insertion++;
          if (evals >= eval_budget) break;
        }
      }

      order();
      notify(iter, step);
    }

    out.best_point = simplex.front().x;
    out.best_cost = simplex.front().cost;
    out.evals = evals;
    out.termination = reason;
  };

  OptResult result;
  run(x0, config.max_evals, result);

  if (config.restart && result.termination != TerminationReason::max_evals) {
    OptResult second;
    run(result.best_point, config.max_evals, second);
    if (second.best_cost <= result.best_cost) {
      second.evals = evals;
      result = second;
    } else {
      result.evals = evals;
    }
  }
  return result;
}

}  // namespace usreg
