#include "rsched/sparse_lu.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsched::detail {
namespace {

constexpr double kThreshold = 0.01;  // relative partial-pivoting threshold
constexpr double kDropTol = 1e-14;
constexpr int kSearchDepth = 4;

// Items bucketed by count, as intrusive doubly linked lists.
class CountLists {
 public:
  CountLists(int items, int max_count)
      : head_(static_cast<std::size_t>(max_count) + 2, -1),
        next_(static_cast<std::size_t>(items), -1),
        prev_(static_cast<std::size_t>(items), -1),
        count_(static_cast<std::size_t>(items), -1) {}

  void insert(int id, int count) {
    count = std::min(count, static_cast<int>(head_.size()) - 1);
    count_[static_cast<std::size_t>(id)] = count;
    prev_[static_cast<std::size_t>(id)] = -1;
    next_[static_cast<std::size_t>(id)] = head_[static_cast<std::size_t>(count)];
    if (head_[static_cast<std::size_t>(count)] >= 0) {
      prev_[static_cast<std::size_t>(head_[static_cast<std::size_t>(count)])] = id;
    }
    head_[static_cast<std::size_t>(count)] = id;
  }

  void remove(int id) {
    const int count = count_[static_cast<std::size_t>(id)];
    if (count < 0) return;
    const int p = prev_[static_cast<std::size_t>(id)];
    const int n = next_[static_cast<std::size_t>(id)];
    if (p >= 0) next_[static_cast<std::size_t>(p)] = n;
    else head_[static_cast<std::size_t>(count)] = n;
    if (n >= 0) prev_[static_cast<std::size_t>(n)] = p;
    count_[static_cast<std::size_t>(id)] = -1;
  }

  void move(int id, int count) {
    remove(id);
    insert(id, count);
  }

  int first(int count) const { return head_[static_cast<std::size_t>(count)]; }
  int next(int id) const { return next_[static_cast<std::size_t>(id)]; }
  int max_count() const { return static_cast<int>(head_.size()) - 1; }

 private:
  std::vector<int> head_;
  std::vector<int> next_;
  std::vector<int> prev_;
  std::vector<int> count_;
};

}  // namespace

SparseLU::Singularity SparseLU::factor(int m, const std::vector<SparseColumn>& columns,
                                       double pivot_tol) {
  m_ = m;
  pivots_.clear();
  etas_.clear();
  work_.assign(static_cast<std::size_t>(m), 0.0);

  // Active submatrix: values stored by row, structure by column.
  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(m));
  std::vector<std::vector<int>> cols(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    for (const auto& [r, v] : columns[static_cast<std::size_t>(k)]) {
      if (v == 0.0) continue;
      rows[static_cast<std::size_t>(r)].emplace_back(k, v);
      cols[static_cast<std::size_t>(k)].push_back(r);
    }
  }
  std::vector<char> row_done(static_cast<std::size_t>(m), 0);
  std::vector<char> col_done(static_cast<std::size_t>(m), 0);
  CountLists col_lists(m, m);
  CountLists row_lists(m, m);
  for (int k = 0; k < m; ++k) {
    col_lists.insert(k, static_cast<int>(cols[static_cast<std::size_t>(k)].size()));
    row_lists.insert(k, static_cast<int>(rows[static_cast<std::size_t>(k)].size()));
  }

  auto value_at = [&](int r, int c) {
    for (const auto& [col, v] : rows[static_cast<std::size_t>(r)]) {
      if (col == c) return v;
    }
    return 0.0;
  };
  auto column_max = [&](int c) {
    double best = 0.0;
    for (int r : cols[static_cast<std::size_t>(c)]) best = std::max(best, std::abs(value_at(r, c)));
    return best;
  };

  std::vector<int> slot_in_row(static_cast<std::size_t>(m), -1);
  pivots_.reserve(static_cast<std::size_t>(m));

  for (int step = 0; step < m; ++step) {
    // Markowitz search over short columns and rows.
    int best_row = -1;
    int best_col = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    double best_mag = 0.0;
    int searched = 0;
    for (int count = 1; count <= col_lists.max_count() && searched < kSearchDepth; ++count) {
      for (int c = col_lists.first(count); c >= 0 && searched < kSearchDepth; c = col_lists.next(c)) {
        const double cmax = column_max(c);
        for (int r : cols[static_cast<std::size_t>(c)]) {
          const double mag = std::abs(value_at(r, c));
          if (mag < pivot_tol || mag < kThreshold * cmax) continue;
          const double cost = static_cast<double>(rows[static_cast<std::size_t>(r)].size() - 1) * (count - 1);
          if (cost < best_cost || (cost == best_cost && mag > best_mag)) {
            best_cost = cost;
            best_mag = mag;
            best_row = r;
            best_col = c;
          }
        }
        ++searched;
      }
      for (int r = row_lists.first(count); r >= 0 && searched < kSearchDepth; r = row_lists.next(r)) {
        for (const auto& [c, v] : rows[static_cast<std::size_t>(r)]) {
          const double mag = std::abs(v);
          if (mag < pivot_tol || mag < kThreshold * column_max(c)) continue;
          const double cost = static_cast<double>(count - 1) * (cols[static_cast<std::size_t>(c)].size() - 1);
          if (cost < best_cost || (cost == best_cost && mag > best_mag)) {
            best_cost = cost;
            best_mag = mag;
            best_row = r;
            best_col = c;
          }
        }
        ++searched;
      }
      if (best_row >= 0 && best_cost <= static_cast<double>(count - 1) * (count - 1)) break;
    }
    if (best_row < 0) {
      // Fall back to any acceptable entry (long rows and columns only).
      for (int c = 0; c < m && best_row < 0; ++c) {
        if (col_done[static_cast<std::size_t>(c)]) continue;
        const double cmax = column_max(c);
        for (int r : cols[static_cast<std::size_t>(c)]) {
          const double mag = std::abs(value_at(r, c));
          if (mag >= pivot_tol && mag >= kThreshold * cmax) {
            best_row = r;
            best_col = c;
            break;
          }
        }
      }
    }
    if (best_row < 0) break;

    const int p = best_row;
    const int q = best_col;
    Pivot pivot;
    pivot.row = p;
    pivot.position = q;
    pivot.diag = value_at(p, q);
    for (const auto& [c, v] : rows[static_cast<std::size_t>(p)]) {
      if (c != q) pivot.upper.emplace_back(c, v);
    }

    row_done[static_cast<std::size_t>(p)] = 1;
    col_done[static_cast<std::size_t>(q)] = 1;
    row_lists.remove(p);
    col_lists.remove(q);

    // Pivot row leaves the structure of its other columns.
    for (const auto& [c, v] : pivot.upper) {
      auto& structure = cols[static_cast<std::size_t>(c)];
      structure.erase(std::find(structure.begin(), structure.end(), p));
    }

    // Eliminate below the pivot.
    std::vector<int> touched_cols;
    for (int r : cols[static_cast<std::size_t>(q)]) {
      if (r == p) continue;
      auto& row = rows[static_cast<std::size_t>(r)];
      const double l = value_at(r, q) / pivot.diag;
      pivot.lower.emplace_back(r, l);
      row.erase(std::find_if(row.begin(), row.end(), [q](const auto& e) { return e.first == q; }));
      for (std::size_t idx = 0; idx < row.size(); ++idx) {
        slot_in_row[static_cast<std::size_t>(row[idx].first)] = static_cast<int>(idx);
      }
      for (const auto& [c, u] : pivot.upper) {
        const int at = slot_in_row[static_cast<std::size_t>(c)];
        if (at >= 0) {
          row[static_cast<std::size_t>(at)].second -= l * u;
        } else {
          row.emplace_back(c, -l * u);
          cols[static_cast<std::size_t>(c)].push_back(r);
          touched_cols.push_back(c);
        }
      }
      for (const auto& e : row) slot_in_row[static_cast<std::size_t>(e.first)] = -1;
      // Drop cancellations.
      for (std::size_t idx = 0; idx < row.size();) {
        if (std::abs(row[idx].second) < kDropTol) {
          auto& structure = cols[static_cast<std::size_t>(row[idx].first)];
          structure.erase(std::find(structure.begin(), structure.end(), r));
          touched_cols.push_back(row[idx].first);
          row[idx] = row.back();
          row.pop_back();
        } else {
          ++idx;
        }
      }
      row_lists.move(r, static_cast<int>(row.size()));
    }
    cols[static_cast<std::size_t>(q)].clear();
    rows[static_cast<std::size_t>(p)].clear();
    for (const auto& [c, u] : pivot.upper) touched_cols.push_back(c);
    for (int c : touched_cols) {
      if (!col_done[static_cast<std::size_t>(c)]) {
        col_lists.move(c, static_cast<int>(cols[static_cast<std::size_t>(c)].size()));
      }
    }
    pivots_.push_back(std::move(pivot));
  }

  Singularity singular;
  if (static_cast<int>(pivots_.size()) < m) {
    for (int k = 0; k < m; ++k) {
      if (!col_done[static_cast<std::size_t>(k)]) singular.positions.push_back(k);
      if (!row_done[static_cast<std::size_t>(k)]) singular.rows.push_back(k);
    }
  }
  return singular;
}

void SparseLU::ftran(std::vector<double>& values) const {
  std::vector<double>& b = values;
  for (const Pivot& pv : pivots_) {
    const double bp = b[static_cast<std::size_t>(pv.row)];
    if (bp == 0.0) continue;
    for (const auto& [r, l] : pv.lower) b[static_cast<std::size_t>(r)] -= l * bp;
  }
  std::vector<double>& x = work_;
  std::fill(x.begin(), x.end(), 0.0);
  for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
    double acc = b[static_cast<std::size_t>(it->row)];
    for (const auto& [c, u] : it->upper) acc -= u * x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(it->position)] = acc / it->diag;
  }
  for (const Eta& eta : etas_) {
    double& xr = x[static_cast<std::size_t>(eta.position)];
    xr /= eta.pivot;
    if (xr == 0.0) continue;
    for (const auto& [i, a] : eta.entries) x[static_cast<std::size_t>(i)] -= a * xr;
  }
  values.swap(work_);
}

void SparseLU::btran(std::vector<double>& values) const {
  std::vector<double>& c = values;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double acc = c[static_cast<std::size_t>(it->position)];
    for (const auto& [i, a] : it->entries) acc -= a * c[static_cast<std::size_t>(i)];
    c[static_cast<std::size_t>(it->position)] = acc / it->pivot;
  }
  std::vector<double>& z = work_;
  std::fill(z.begin(), z.end(), 0.0);
  for (const Pivot& pv : pivots_) {
    const double zp = c[static_cast<std::size_t>(pv.position)] / pv.diag;
    z[static_cast<std::size_t>(pv.row)] = zp;
    if (zp == 0.0) continue;
    for (const auto& [col, u] : pv.upper) c[static_cast<std::size_t>(col)] -= u * zp;
  }
  for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
    double acc = z[static_cast<std::size_t>(it->row)];
    for (const auto& [r, l] : it->lower) acc -= l * z[static_cast<std::size_t>(r)];
    z[static_cast<std::size_t>(it->row)] = acc;
  }
  values.swap(work_);
}

void SparseLU::update(int r, const std::vector<double>& alpha) {
  Eta eta;
  eta.position = r;
  eta.pivot = alpha[static_cast<std::size_t>(r)];
  for (int i = 0; i < m_; ++i) {
    if (i != r && alpha[static_cast<std::size_t>(i)] != 0.0) {
      eta.entries.emplace_back(i, alpha[static_cast<std::size_t>(i)]);
    }
  }
  etas_.push_back(std::move(eta));
}

std::size_t SparseLU::fill() const {
  std::size_t total = 0;
  for (const Pivot& pv : pivots_) total += 1 + pv.lower.size() + pv.upper.size();
  return total;
}

}  // namespace rsched::detail
