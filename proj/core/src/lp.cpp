#include "rtv/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace rtv {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kOptTol = 1e-9;
constexpr double kPivotTol = 1e-11;
constexpr double kPhase1Tol = 1e-7;
constexpr double kDegenStep = 1e-12;
constexpr int kRefactorEvery = 50;

struct SparseCol {
  double cost = 0.0;
  bool artificial = false;
  std::vector<std::pair<int, double>> entries;  // (row, coefficient)
};

/// Dense revised simplex over sparse columns. Owns all mutable state; one
/// instance per solve.
class Simplex {
 public:
  Simplex(const StandardFormLP& lp, const LpOptions& opts)
      : lp_(lp), opts_(opts), m_(lp.rows()) {
    build_columns();
  }

  LpSolution run() {
    LpSolution out;
    if (!phase(/*phase1=*/true)) {
      out.status = LpStatus::NumericalFailure;
      return out;
    }
    double p1 = 0.0;
    for (int i = 0; i < m_; ++i)
      if (cols_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])].artificial)
        p1 += xb_[static_cast<std::size_t>(i)];
    if (p1 > kPhase1Tol) {
      out.status = LpStatus::Infeasible;
      out.iterations = iterations_;
      return out;
    }
    if (!expel_artificials()) {
      out.status = LpStatus::NumericalFailure;
      return out;
    }
    phase1_ = false;
    if (!phase(/*phase1=*/false)) {
      out.status = LpStatus::NumericalFailure;
      return out;
    }
    extract(out);
    return out;
  }

 private:
  void build_columns() {
    const int nr = lp_.n_requests();
    for (const LpColumn& c : lp_.columns) {
      SparseCol sc;
      sc.cost = c.cost;
      for (int r : c.request_rows) sc.entries.push_back({r, 1.0});
      // vehicle row index derived from the vehicle id position
      int vpos = -1;
      for (std::size_t j = 0; j < lp_.vehicle_ids.size(); ++j)
        if (lp_.vehicle_ids[j] == c.vehicle_id) vpos = static_cast<int>(j);
      sc.entries.push_back({nr + vpos, 1.0});
      cols_.push_back(std::move(sc));
    }
    n_structural_ = static_cast<int>(cols_.size());
    if (lp_.form == LpForm::CoveringPacking) {
      for (int r = 0; r < nr; ++r) {  // surplus for >= rows
        SparseCol sc;
        sc.entries.push_back({r, -1.0});
        cols_.push_back(std::move(sc));
      }
      for (int v = 0; v < lp_.n_vehicles(); ++v) {  // slack for <= rows
        SparseCol sc;
        sc.entries.push_back({nr + v, 1.0});
        cols_.push_back(std::move(sc));
      }
    }
    n_non_artificial_ = static_cast<int>(cols_.size());

    basis_.assign(static_cast<std::size_t>(m_), -1);
    if (lp_.form == LpForm::CoveringPacking) {
      // Vehicle rows start on their slacks; request rows need artificials.
      for (int v = 0; v < lp_.n_vehicles(); ++v)
        basis_[static_cast<std::size_t>(nr + v)] = n_structural_ + nr + v;
    }
    for (int i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] >= 0) continue;
      SparseCol art;
      art.artificial = true;
      art.entries.push_back({i, 1.0});
      cols_.push_back(std::move(art));
      basis_[static_cast<std::size_t>(i)] = static_cast<int>(cols_.size()) - 1;
    }
    in_basis_.assign(cols_.size(), false);
    for (int b : basis_) in_basis_[static_cast<std::size_t>(b)] = true;
    binv_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i)
      binv_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m_) +
            static_cast<std::size_t>(i)] = 1.0;
    xb_.assign(static_cast<std::size_t>(m_), 1.0);  // B = I, b = ones
  }

  double col_cost(int j) const {
    const SparseCol& c = cols_[static_cast<std::size_t>(j)];
    if (phase1_) return c.artificial ? 1.0 : 0.0;
    return c.artificial ? 0.0 : c.cost;
  }

  void compute_duals(std::vector<double>& u) const {
    u.assign(static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) {
      const double cb = col_cost(basis_[static_cast<std::size_t>(i)]);
      if (cb == 0.0) continue;
      const double* row = &binv_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m_)];
      for (int k = 0; k < m_; ++k) u[static_cast<std::size_t>(k)] += cb * row[k];
    }
  }

  double reduced_cost(int j, const std::vector<double>& u) const {
    double rc = col_cost(j);
    for (const auto& [row, coef] : cols_[static_cast<std::size_t>(j)].entries)
      rc -= u[static_cast<std::size_t>(row)] * coef;
    return rc;
  }

  int price(const std::vector<double>& u, bool bland) const {
    int best = -1;
    double best_rc = -kOptTol;
    for (int j = 0; j < static_cast<int>(cols_.size()); ++j) {
      if (in_basis_[static_cast<std::size_t>(j)]) continue;
      if (cols_[static_cast<std::size_t>(j)].artificial) continue;  // never re-enters
      const double rc = reduced_cost(j, u);
      if (rc < -kOptTol) {
        if (bland) return j;
        if (rc < best_rc) {
          best_rc = rc;
          best = j;
        }
      }
    }
    return best;
  }

  void ftran(int j, std::vector<double>& d) const {
    d.assign(static_cast<std::size_t>(m_), 0.0);
    for (const auto& [row, coef] : cols_[static_cast<std::size_t>(j)].entries) {
      for (int i = 0; i < m_; ++i)
        d[static_cast<std::size_t>(i)] +=
            binv_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m_) +
                  static_cast<std::size_t>(row)] *
            coef;
    }
  }

  /// Leaving row, or -1 (unbounded / forced tiny pivot).
  int ratio_test(const std::vector<double>& d) const {
    // Phase-2 guard: a basic artificial pinned at zero must not move.
    if (!phase1_) {
      for (int i = 0; i < m_; ++i) {
        if (cols_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])].artificial &&
            std::abs(d[static_cast<std::size_t>(i)]) > 1e-9 &&
            xb_[static_cast<std::size_t>(i)] <= kFeasTol)
          return i;
      }
    }
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i) {
      const double di = d[static_cast<std::size_t>(i)];
      if (di <= kPivotTol) continue;
      const double ratio = std::max(xb_[static_cast<std::size_t>(i)], 0.0) / di;
      const bool tie = leave >= 0 && std::abs(ratio - best) <= 1e-12;
      if (ratio < best - 1e-12 || (tie && prefer_leaving(i, leave))) {
        best = ratio;
        leave = i;
      }
    }
    return leave;
  }

  bool prefer_leaving(int i, int incumbent) const {
    const int vi = basis_[static_cast<std::size_t>(i)];
    const int vj = basis_[static_cast<std::size_t>(incumbent)];
    const bool ai = cols_[static_cast<std::size_t>(vi)].artificial;
    const bool aj = cols_[static_cast<std::size_t>(vj)].artificial;
    if (ai != aj) return ai;  // drive artificials out first
    return vi < vj;           // then lowest variable index (Bland-compatible)
  }

  [[nodiscard]] bool pivot(int enter, int leave, const std::vector<double>& d) {
    const double piv = d[static_cast<std::size_t>(leave)];
    const double step = std::max(xb_[static_cast<std::size_t>(leave)], 0.0) / piv;
    for (int i = 0; i < m_; ++i)
      xb_[static_cast<std::size_t>(i)] -= step * d[static_cast<std::size_t>(i)];
    xb_[static_cast<std::size_t>(leave)] = step;

    double* prow = &binv_[static_cast<std::size_t>(leave) * static_cast<std::size_t>(m_)];
    for (int k = 0; k < m_; ++k) prow[k] /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == leave) continue;
      const double f = d[static_cast<std::size_t>(i)];
      if (f == 0.0) continue;
      double* row = &binv_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m_)];
      for (int k = 0; k < m_; ++k) row[k] -= f * prow[k];
    }

    in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leave)])] = false;
    basis_[static_cast<std::size_t>(leave)] = enter;
    in_basis_[static_cast<std::size_t>(enter)] = true;

    degenerate_streak_ = (step < kDegenStep) ? degenerate_streak_ + 1 : 0;
    ++iterations_;
    ++pivots_since_refactor_;
    if (pivots_since_refactor_ >= kRefactorEvery) return refactorize();
    return true;
  }

  bool refactorize() {
    // Gauss-Jordan inversion of the basis matrix.
    const std::size_t mm = static_cast<std::size_t>(m_);
    std::vector<double> a(mm * mm, 0.0), inv(mm * mm, 0.0);
    for (std::size_t i = 0; i < mm; ++i) inv[i * mm + i] = 1.0;
    for (int i = 0; i < m_; ++i) {
      for (const auto& [row, coef] :
           cols_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])].entries)
        a[static_cast<std::size_t>(row) * mm + static_cast<std::size_t>(i)] = coef;
    }
    for (std::size_t col = 0; col < mm; ++col) {
      std::size_t piv_row = col;
      double piv = std::abs(a[col * mm + col]);
      for (std::size_t r = col + 1; r < mm; ++r) {
        if (std::abs(a[r * mm + col]) > piv) {
          piv = std::abs(a[r * mm + col]);
          piv_row = r;
        }
      }
      if (piv < kPivotTol) return false;  // singular basis
      if (piv_row != col) {
        for (std::size_t k = 0; k < mm; ++k) {
          std::swap(a[piv_row * mm + k], a[col * mm + k]);
          std::swap(inv[piv_row * mm + k], inv[col * mm + k]);
        }
      }
      const double pv = a[col * mm + col];
      for (std::size_t k = 0; k < mm; ++k) {
        a[col * mm + k] /= pv;
        inv[col * mm + k] /= pv;
      }
      for (std::size_t r = 0; r < mm; ++r) {
        if (r == col) continue;
        const double f = a[r * mm + col];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < mm; ++k) {
          a[r * mm + k] -= f * a[col * mm + k];
          inv[r * mm + k] -= f * inv[col * mm + k];
        }
      }
    }
    binv_ = std::move(inv);
    // Recompute basic values from scratch for stability.
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      for (int k = 0; k < m_; ++k)
        s += binv_[static_cast<std::size_t>(i) * mm + static_cast<std::size_t>(k)];
      xb_[static_cast<std::size_t>(i)] = s;  // b is all ones
    }
    pivots_since_refactor_ = 0;
    return true;
  }

  double primal_objective() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i)
      s += col_cost(basis_[static_cast<std::size_t>(i)]) * xb_[static_cast<std::size_t>(i)];
    return s;
  }

  bool phase(bool phase1) {
    phase1_ = phase1;
    degenerate_streak_ = 0;
    const int bland_threshold =
        5 * (m_ + static_cast<int>(cols_.size()));
    const long long max_iters =
        200000LL + 50LL * (m_ + static_cast<int>(cols_.size()));
    std::vector<double> u, d;
    bool bland = false;
    for (long long it = 0; it < max_iters; ++it) {
      compute_duals(u);
      if (opts_.record_duality_log && !phase1_) {
        double dual_obj = 0.0;
        for (int i = 0; i < m_; ++i) dual_obj += u[static_cast<std::size_t>(i)];
        duality_log_.push_back({primal_objective(), dual_obj});
      }
      const int enter = price(u, bland);
      if (enter < 0) return true;  // optimal for this phase
      ftran(enter, d);
      const int leave = ratio_test(d);
      if (leave < 0) return false;  // unbounded direction: numerical trouble
      if (!pivot(enter, leave, d)) return false;
      if (degenerate_streak_ > bland_threshold) bland = true;
      if (degenerate_streak_ == 0) bland = false;
    }
    return false;  // iteration cap
  }

  [[nodiscard]] bool expel_artificials() {
    for (int i = 0; i < m_; ++i) {
      const int bv = basis_[static_cast<std::size_t>(i)];
      if (!cols_[static_cast<std::size_t>(bv)].artificial) continue;
      const double* row = &binv_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m_)];
      int enter = -1;
      for (int j = 0; j < n_non_artificial_ && enter < 0; ++j) {
        if (in_basis_[static_cast<std::size_t>(j)]) continue;
        double alpha = 0.0;
        for (const auto& [r, coef] : cols_[static_cast<std::size_t>(j)].entries)
          alpha += row[r] * coef;
        if (std::abs(alpha) > 1e-9) enter = j;
      }
      if (enter < 0) continue;  // dependent row; guarded in phase 2
      std::vector<double> d;
      ftran(enter, d);
      if (!pivot(enter, i, d)) return false;
    }
    return true;
  }

  void extract(LpSolution& out) {
    out.status = LpStatus::Optimal;
    out.iterations = iterations_;
    out.duality_log = std::move(duality_log_);

    std::vector<double> x(static_cast<std::size_t>(n_structural_), 0.0);
    for (int i = 0; i < m_; ++i) {
      const int bv = basis_[static_cast<std::size_t>(i)];
      if (bv < n_structural_) {
        double v = xb_[static_cast<std::size_t>(i)];
        if (v < 0.0 && v > -kFeasTol) v = 0.0;
        x[static_cast<std::size_t>(bv)] = v;
      }
    }
    double obj = 0.0;
    for (int j = 0; j < n_structural_; ++j) {
      obj += lp_.columns[static_cast<std::size_t>(j)].cost * x[static_cast<std::size_t>(j)];
      if (x[static_cast<std::size_t>(j)] > 1e-12) {
        const LpColumn& c = lp_.columns[static_cast<std::size_t>(j)];
        out.primal.set(c.vehicle_id, c.trip_id,
                       std::min(x[static_cast<std::size_t>(j)], 1.0));
      }
    }
    out.primal.objective = obj;

    std::vector<double> u;
    compute_duals(u);
    out.dual.y.resize(static_cast<std::size_t>(lp_.n_requests()));
    out.dual.z.resize(static_cast<std::size_t>(lp_.n_vehicles()));
    for (int r = 0; r < lp_.n_requests(); ++r) {
      double y = u[static_cast<std::size_t>(r)];
      if (lp_.form == LpForm::CoveringPacking && y < 0.0 && y > -1e-9) y = 0.0;
      out.dual.y[static_cast<std::size_t>(r)] = y;
    }
    for (int v = 0; v < lp_.n_vehicles(); ++v) {
      double z = -u[static_cast<std::size_t>(lp_.n_requests() + v)];
      if (lp_.form == LpForm::CoveringPacking && z < 0.0 && z > -1e-9) z = 0.0;
      out.dual.z[static_cast<std::size_t>(v)] = z;
    }
  }

  const StandardFormLP& lp_;
  const LpOptions& opts_;
  int m_;
  int n_structural_ = 0;
  int n_non_artificial_ = 0;
  bool phase1_ = true;
  std::vector<SparseCol> cols_;
  std::vector<int> basis_;
  std::vector<bool> in_basis_;
  std::vector<double> binv_;
  std::vector<double> xb_;
  int iterations_ = 0;
  int pivots_since_refactor_ = 0;
  int degenerate_streak_ = 0;
  std::vector<std::pair<double, double>> duality_log_;
};

}  // namespace

StandardFormLP build_lp(const TripCatalog& cat, const Instance& inst,
                        LpForm form) {
  StandardFormLP lp;
  lp.form = form;
  lp.request_ids = cat.request_ids;
  lp.vehicle_ids = cat.vehicle_ids;
  std::vector<std::size_t> order(inst.vehicles.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cat.vehicle_ids[a] < cat.vehicle_ids[b];
  });
  for (std::size_t v : order) {
    for (const auto& adm : cat.per_vehicle[v]) {  // already sorted by trip id
      LpColumn col;
      col.vehicle_id = cat.vehicle_ids[v];
      col.trip_id = adm.trip;
      col.cost = adm.cost;
      for (int r : cat.trips[static_cast<std::size_t>(adm.trip)].requests())
        col.request_rows.push_back(cat.request_index(r));
      lp.columns.push_back(std::move(col));
    }
  }
  return lp;
}

LpSolution solve_lp(const StandardFormLP& lp, const LpOptions& opts) {
  Simplex s(lp, opts);
  return s.run();
}

SupportHistogram support_histogram(const FractionalSolution& x, int bins) {
  if (bins < 2) throw std::invalid_argument("support_histogram: bins must be >= 2");
  SupportHistogram h;
  h.bin_counts.assign(static_cast<std::size_t>(bins), 0);
  int nonintegral = 0;
  for (const auto& [key, v] : x.values) {
    (void)key;
    if (v <= 1e-7) continue;
    ++h.support_count;
    int b = static_cast<int>(v * bins);
    b = std::clamp(b, 0, bins - 1);
    ++h.bin_counts[static_cast<std::size_t>(b)];
    if (std::abs(v - 1.0) <= 1e-6) {
      ++h.integral_count;
    } else {
      ++nonintegral;
      if (std::abs(v - 0.5) <= 1e-6) ++h.half_integral_count;
    }
  }
  h.integral_fraction =
      h.support_count == 0
          ? 1.0
          : static_cast<double>(h.integral_count) / h.support_count;
  h.half_integral_fraction =
      nonintegral == 0 ? 0.0
                       : static_cast<double>(h.half_integral_count) / nonintegral;
  return h;
}

void dump_lp(const StandardFormLP& lp, std::ostream& os) {
  os << "\\ RTV assignment LP (" ;
  os << (lp.form == LpForm::Equality ? "equality" : "covering-packing");
  os << " form)\n";
  for (std::size_t j = 0; j < lp.columns.size(); ++j) {
    os << "\\ x" << j << " = (vehicle " << lp.columns[j].vehicle_id
       << ", trip " << lp.columns[j].trip_id << ")\n";
  }
  os << "Minimize\n obj:";
  for (std::size_t j = 0; j < lp.columns.size(); ++j) {
    os << (j == 0 ? " " : " + ") << lp.columns[j].cost << " x" << j;
  }
  os << "\nSubject To\n";
  const char* req_sense = lp.form == LpForm::Equality ? " = 1" : " >= 1";
  const char* veh_sense = lp.form == LpForm::Equality ? " = 1" : " <= 1";
  for (int r = 0; r < lp.n_requests(); ++r) {
    os << " r" << lp.request_ids[static_cast<std::size_t>(r)] << ":";
    bool first = true;
    for (std::size_t j = 0; j < lp.columns.size(); ++j) {
      for (int rr : lp.columns[j].request_rows) {
        if (rr == r) {
          os << (first ? " " : " + ") << "x" << j;
          first = false;
        }
      }
    }
    os << req_sense << "\n";
  }
  for (int v = 0; v < lp.n_vehicles(); ++v) {
    os << " v" << lp.vehicle_ids[static_cast<std::size_t>(v)] << ":";
    bool first = true;
    for (std::size_t j = 0; j < lp.columns.size(); ++j) {
      if (lp.columns[j].vehicle_id == lp.vehicle_ids[static_cast<std::size_t>(v)]) {
        os << (first ? " " : " + ") << "x" << j;
        first = false;
      }
    }
    os << veh_sense << "\n";
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < lp.columns.size(); ++j)
    os << " 0 <= x" << j << "\n";
  os << "End\n";
}

}  // namespace rtv
