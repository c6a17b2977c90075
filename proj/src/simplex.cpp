#include "balpart/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace balpart {

LinearProgram add_rows(const LinearProgram& lp, std::span<const LpRow> rows) {
    LinearProgram out = lp;
    for (const LpRow& r : rows) {
        for (int c : r.cols)
            if (c < 0 || c >= lp.ncols) throw std::out_of_range("add_rows: bad column index");
        out.rows.push_back(r);
    }
    return out;
}

LinearProgram fix_var(const LinearProgram& lp, int j, double value) {
    if (j < 0 || j >= lp.ncols) throw std::out_of_range("fix_var: bad column index");
    LinearProgram out = lp;
    out.lb[j] = value;
    out.ub[j] = value;
    return out;
}

LpBasis extend_basis(const LpBasis& parent, int ncols, int new_nrows) {
    LpBasis b = parent;
    int old_nrows = static_cast<int>(parent.basic_of_row.size());
    for (int i = old_nrows; i < new_nrows; ++i)
        b.basic_of_row.push_back(ncols + i);
    b.at_upper.resize(static_cast<std::size_t>(ncols) + new_nrows, 0);
    return b;
}

#include <cstdio>
#include <cstdlib>

namespace {

bool paranoid_checks() {
    static bool on = std::getenv("BALPART_LP_CHECK") != nullptr;
    return on;
}

constexpr double kPivotTol = 1e-10;
constexpr double kDegenStep = 1e-10;
// below this magnitude a pivot element is too weak for the O(s^2) inverse
// updates; the kernel is refactorized from scratch instead
constexpr double kUpdateTol = 1e-6;

enum VStat : std::uint8_t { AT_LOWER = 0, AT_UPPER = 1, BASIC = 2 };

// Bounded-variable primal simplex.  The basis always consists of some slack
// columns (unit vectors) plus a set J of structural columns; only the square
// kernel K = A[R, J] over the rows R not covered by a basic slack is factored
// (dense inverse), so work scales with the structural basis size rather than
// the full row count.
class Engine {
  public:
    Engine(const LinearProgram& lp, const SimplexOptions& opts) : lp_(lp), opts_(opts) {
        n_ = lp.ncols;
        m_ = lp.nrows();
        nv_ = n_ + m_;
        build_columns();
        build_bounds();
    }

    LpResult run(const LpBasis* warm) {
        load_basis(warm);
        if (!refactor()) {
            reset_slack_basis();
            if (!refactor()) throw SimplexError("singular slack basis");
        }
        compute_x();

        phase1_ = true;
        long long iters = 0;
        int pivots_since_refactor = 0;
        int degen_streak = 0;
        bool bland = false;

        while (true) {
            if (++iters > opts_.max_iterations) throw SimplexError("iteration limit exceeded");
            if ((iters & 0x3F) == 1 && opts_.deadline &&
                std::chrono::steady_clock::now() >= *opts_.deadline)
                throw SimplexInterrupted();

            double infeas = total_infeasibility();
            if (phase1_ && infeas <= opts_.feas_tol) {
                phase1_ = false;
                compute_x();
            } else if (!phase1_ && infeas > 10.0 * opts_.feas_tol) {
                // drift or a basis reset broke feasibility: back to phase 1
                phase1_ = true;
            }
            bool phase1 = phase1_;

            compute_duals(phase1);
            int q = choose_entering(phase1, bland);
            if (q < 0) {
                if (phase1) {
                    if (total_infeasibility() > opts_.feas_tol) return make_infeasible(iters);
                    phase1_ = false;
                    compute_x();
                    continue;
                }
                return make_optimal(iters);
            }

            ftran(q);
            int dir = stat_[q] == AT_UPPER ? -1 : 1;

            double step = 0.0;
            int leaving = -1;
            int leave_bound = AT_LOWER;
            if (!ratio_test(q, dir, phase1, bland, step, leaving, leave_bound)) {
                // no blocking bound: impossible for a bounded objective,
                // so treat as numerical breakdown
                if (!recover()) throw SimplexError("unbounded direction");
                continue;
            }

            if (step <= kDegenStep)
                ++degen_streak;
            else {
                degen_streak = 0;
                bland = false;
            }
            if (degen_streak > opts_.bland_after) bland = true;

            apply_step(q, dir, step);
            if (leaving == q) {
                stat_[q] = stat_[q] == AT_LOWER ? AT_UPPER : AT_LOWER;
                xval_[q] = stat_[q] == AT_UPPER ? ub_[q] : lb_[q];
            } else {
                pivot(q, dir, leaving, leave_bound);
                if (++pivots_since_refactor >= opts_.refactor_interval) {
                    pivots_since_refactor = 0;
                    if (!refactor()) {
                        if (!recover()) throw SimplexError("singular basis");
                    }
                    compute_x();
                }
            }
        }
    }

  private:
    // ---- setup ----------------------------------------------------------
    void build_columns() {
        std::vector<int> counts(n_, 0);
        for (const LpRow& r : lp_.rows)
            for (int c : r.cols) ++counts[c];
        col_start_.assign(n_ + 1, 0);
        for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + counts[j];
        col_row_.resize(col_start_[n_]);
        col_val_.resize(col_start_[n_]);
        std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
        for (int i = 0; i < m_; ++i) {
            const LpRow& r = lp_.rows[i];
            for (std::size_t t = 0; t < r.cols.size(); ++t) {
                int j = r.cols[t];
                col_row_[fill[j]] = i;
                col_val_[fill[j]] = r.coefs[t];
                ++fill[j];
            }
        }
    }

    void build_bounds() {
        lb_.resize(nv_);
        ub_.resize(nv_);
        for (int j = 0; j < n_; ++j) {
            lb_[j] = lp_.lb[j];
            ub_[j] = lp_.ub[j];
            if (lb_[j] <= -kInf || ub_[j] >= kInf)
                throw SimplexError("structural columns need finite bounds");
            if (lb_[j] > ub_[j]) throw SimplexError("column with lb > ub");
        }
        for (int i = 0; i < m_; ++i) {
            switch (lp_.rows[i].rel) {
                case Relation::LE:
                    lb_[n_ + i] = 0.0;
                    ub_[n_ + i] = kInf;
                    break;
                case Relation::GE:
                    lb_[n_ + i] = -kInf;
                    ub_[n_ + i] = 0.0;
                    break;
                case Relation::EQ:
                    lb_[n_ + i] = 0.0;
                    ub_[n_ + i] = 0.0;
                    break;
            }
        }
    }

    // ---- basis bookkeeping ----------------------------------------------
    void reset_slack_basis() {
        stat_.assign(nv_, AT_LOWER);
        for (int j = 0; j < n_; ++j) stat_[j] = AT_LOWER;
        for (int i = 0; i < m_; ++i) stat_[n_ + i] = BASIC;
        rebuild_sets();
    }

    void load_basis(const LpBasis* warm) {
        if (!warm || warm->empty() ||
            static_cast<int>(warm->basic_of_row.size()) != m_ ||
            static_cast<int>(warm->at_upper.size()) != nv_) {
            reset_slack_basis();
            return;
        }
        stat_.assign(nv_, AT_LOWER);
        int nbasic = 0;
        for (int v : warm->basic_of_row) {
            if (v < 0 || v >= nv_ || stat_[v] == BASIC) {
                reset_slack_basis();
                return;
            }
            stat_[v] = BASIC;
            ++nbasic;
        }
        if (nbasic != m_) {
            reset_slack_basis();
            return;
        }
        for (int v = 0; v < nv_; ++v)
            if (stat_[v] != BASIC && warm->at_upper[v]) stat_[v] = AT_UPPER;
        // nonbasic vars must sit on a finite bound
        for (int v = 0; v < nv_; ++v) {
            if (stat_[v] == AT_LOWER && lb_[v] <= -kInf) stat_[v] = AT_UPPER;
            if (stat_[v] == AT_UPPER && ub_[v] >= kInf) stat_[v] = AT_LOWER;
        }
        rebuild_sets();
    }

    void rebuild_sets() {
        J_.clear();
        R_.clear();
        pos_in_J_.assign(n_, -1);
        pos_in_R_.assign(m_, -1);
        covered_.assign(m_, 0);
        for (int i = 0; i < m_; ++i)
            if (stat_[n_ + i] == BASIC) covered_[i] = 1;
        for (int j = 0; j < n_; ++j)
            if (stat_[j] == BASIC) {
                pos_in_J_[j] = static_cast<int>(J_.size());
                J_.push_back(j);
            }
        for (int i = 0; i < m_; ++i)
            if (!covered_[i]) {
                pos_in_R_[i] = static_cast<int>(R_.size());
                R_.push_back(i);
            }
    }

    // Builds and inverts the kernel K = A[R, J].  Returns false when singular.
    bool refactor() {
        if (J_.size() != R_.size()) return false;
        int s = static_cast<int>(J_.size());
        s_ = s;
        kinv_.assign(static_cast<std::size_t>(s) * s, 0.0);
        if (s == 0) return true;
        std::vector<double> k(static_cast<std::size_t>(s) * s, 0.0);
        for (int t = 0; t < s; ++t) {
            int j = J_[t];
            for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
                int r = col_row_[e];
                if (pos_in_R_[r] >= 0)
                    k[static_cast<std::size_t>(pos_in_R_[r]) * s + t] = col_val_[e];
            }
        }
        // Gauss-Jordan with partial pivoting
        for (int t = 0; t < s; ++t) kinv_[static_cast<std::size_t>(t) * s + t] = 1.0;
        for (int col = 0; col < s; ++col) {
            int piv = -1;
            double best = kPivotTol;
            for (int r = col; r < s; ++r) {
                double v = std::fabs(k[static_cast<std::size_t>(r) * s + col]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (piv < 0) return false;
            if (piv != col) {
                for (int c = 0; c < s; ++c) {
                    std::swap(k[static_cast<std::size_t>(piv) * s + c],
                              k[static_cast<std::size_t>(col) * s + c]);
                    std::swap(kinv_[static_cast<std::size_t>(piv) * s + c],
                              kinv_[static_cast<std::size_t>(col) * s + c]);
                }
            }
            double inv = 1.0 / k[static_cast<std::size_t>(col) * s + col];
            for (int c = 0; c < s; ++c) {
                k[static_cast<std::size_t>(col) * s + c] *= inv;
                kinv_[static_cast<std::size_t>(col) * s + c] *= inv;
            }
            for (int r = 0; r < s; ++r) {
                if (r == col) continue;
                double f = k[static_cast<std::size_t>(r) * s + col];
                if (f == 0.0) continue;
                for (int c = 0; c < s; ++c) {
                    k[static_cast<std::size_t>(r) * s + c] -=
                        f * k[static_cast<std::size_t>(col) * s + c];
                    kinv_[static_cast<std::size_t>(r) * s + c] -=
                        f * kinv_[static_cast<std::size_t>(col) * s + c];
                }
            }
        }
        return true;
    }

    bool recover() {
        if (++recoveries_ > 3) return false;
        reset_slack_basis();
        if (!refactor()) return false;
        compute_x();
        phase1_ = true;  // the fresh slack basis is usually infeasible
        return true;
    }

    // ---- numerical kernels ------------------------------------------------
    void compute_x() {
        xval_.resize(nv_);
        for (int v = 0; v < nv_; ++v) {
            if (stat_[v] == AT_LOWER)
                xval_[v] = lb_[v] > -kInf ? lb_[v] : 0.0;
            else if (stat_[v] == AT_UPPER)
                xval_[v] = ub_[v] < kInf ? ub_[v] : 0.0;
        }
        // activity of nonbasic structural columns
        std::vector<double> act(m_, 0.0);
        for (int j = 0; j < n_; ++j) {
            if (stat_[j] == BASIC || xval_[j] == 0.0) continue;
            double xj = xval_[j];
            for (int e = col_start_[j]; e < col_start_[j + 1]; ++e)
                act[col_row_[e]] += col_val_[e] * xj;
        }
        int s = s_;
        std::vector<double> rhs(s);
        for (int p = 0; p < s; ++p) {
            int r = R_[p];
            rhs[p] = lp_.rows[r].rhs - act[r] - xval_[n_ + r];
        }
        for (int t = 0; t < s; ++t) {
            double sum = 0.0;
            const double* row = &kinv_[static_cast<std::size_t>(t) * s];
            for (int p = 0; p < s; ++p) sum += row[p] * rhs[p];
            xval_[J_[t]] = sum;
        }
        for (int t = 0; t < s; ++t) {
            int j = J_[t];
            double xj = xval_[j];
            if (xj == 0.0) continue;
            for (int e = col_start_[j]; e < col_start_[j + 1]; ++e)
                act[col_row_[e]] += col_val_[e] * xj;
        }
        for (int i = 0; i < m_; ++i)
            if (covered_[i]) xval_[n_ + i] = lp_.rows[i].rhs - act[i];
    }

    double infeas_amount(int v) const {
        if (xval_[v] < lb_[v]) return lb_[v] - xval_[v];
        if (xval_[v] > ub_[v]) return xval_[v] - ub_[v];
        return 0.0;
    }

    double total_infeasibility() const {
        double total = 0.0;
        for (int t = 0; t < s_; ++t) total += infeas_amount(J_[t]);
        for (int i = 0; i < m_; ++i)
            if (covered_[i]) total += infeas_amount(n_ + i);
        return total;
    }

    // phase-1 cost of a basic variable: -1 below its bound, +1 above
    double phase1_cost(int v) const {
        if (xval_[v] < lb_[v] - opts_.feas_tol) return -1.0;
        if (xval_[v] > ub_[v] + opts_.feas_tol) return 1.0;
        return 0.0;
    }

    void compute_duals(bool phase1) {
        y_.assign(m_, 0.0);
        int s = s_;
        vtmp_.assign(s, 0.0);
        std::vector<double>& v = vtmp_;
        if (phase1) {
            for (int i = 0; i < m_; ++i)
                if (covered_[i]) y_[i] = phase1_cost(n_ + i);
            for (int t = 0; t < s; ++t) {
                int j = J_[t];
                double delta = phase1_cost(j);
                double corr = 0.0;
                for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
                    int r = col_row_[e];
                    if (covered_[r] && y_[r] != 0.0) corr += col_val_[e] * y_[r];
                }
                v[t] = delta - corr;
            }
        } else {
            for (int t = 0; t < s; ++t) v[t] = lp_.obj[J_[t]];
        }
        for (int p = 0; p < s; ++p) {
            double sum = 0.0;
            for (int t = 0; t < s; ++t) sum += kinv_[static_cast<std::size_t>(t) * s + p] * v[t];
            y_[R_[p]] = sum;
        }
    }

    double reduced_cost(int vid, bool phase1) const {
        if (vid < n_) {
            double d = phase1 ? 0.0 : lp_.obj[vid];
            for (int e = col_start_[vid]; e < col_start_[vid + 1]; ++e)
                d -= col_val_[e] * y_[col_row_[e]];
            return d;
        }
        return -y_[vid - n_];
    }

    int choose_entering(bool phase1, bool bland) {
        int best = -1;
        double best_score = opts_.opt_tol;
        for (int vid = 0; vid < nv_; ++vid) {
            if (stat_[vid] == BASIC) continue;
            if (ub_[vid] - lb_[vid] < kPivotTol) continue;  // fixed
            double d = reduced_cost(vid, phase1);
            double score;
            if (stat_[vid] == AT_LOWER)
                score = -d;
            else
                score = d;
            if (score <= opts_.opt_tol) continue;
            if (bland) return vid;
            if (score > best_score) {
                best_score = score;
                best = vid;
            }
        }
        return best;
    }

    // w = direction of basic variables when q enters; stored split as
    // wj_ over J slots and ws_ over covered rows.  wj_raw_ keeps Kinv * a_R
    // before the entering-direction sign is folded in (needed by the
    // column-replace update).
    void ftran(int q) {
        int s = s_;
        aR_.assign(s, 0.0);
        if (q < n_) {
            for (int e = col_start_[q]; e < col_start_[q + 1]; ++e) {
                int r = col_row_[e];
                if (pos_in_R_[r] >= 0) aR_[pos_in_R_[r]] = col_val_[e];
            }
        } else {
            int r = q - n_;
            // entering slack is nonbasic, hence its row is uncovered
            aR_[pos_in_R_[r]] = 1.0;
        }
        wj_raw_.assign(s, 0.0);
        for (int t = 0; t < s; ++t) {
            double sum = 0.0;
            const double* row = &kinv_[static_cast<std::size_t>(t) * s];
            for (int p = 0; p < s; ++p) sum += row[p] * aR_[p];
            wj_raw_[t] = sum;
        }
        if (static_cast<int>(ws_.size()) != m_) {
            ws_.assign(m_, 0.0);
            ws_mark_.assign(m_, 0);
        }
        for (int r : ws_touched_) {
            ws_[r] = 0.0;
            ws_mark_[r] = 0;
        }
        ws_touched_.clear();
        auto touch = [&](int r, double delta) {
            if (!ws_mark_[r]) {
                ws_mark_[r] = 1;
                ws_touched_.push_back(r);
            }
            ws_[r] += delta;
        };
        for (int t = 0; t < s; ++t) {
            double w = wj_raw_[t];
            if (w == 0.0) continue;
            int j = J_[t];
            for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
                int r = col_row_[e];
                if (covered_[r]) touch(r, -col_val_[e] * w);
            }
        }
        if (q < n_) {
            for (int e = col_start_[q]; e < col_start_[q + 1]; ++e) {
                int r = col_row_[e];
                if (covered_[r]) touch(r, col_val_[e]);
            }
        }
    }

    // Two-pass (Harris) ratio test.  In phase 1 an infeasible basic variable
    // blocks when it reaches the bound it violates; feasible ones block at
    // the bound they approach.  Pass 1 finds the largest step that keeps all
    // blocks within the feasibility tolerance; pass 2 picks, among candidates
    // whose exact ratio fits under that relaxed step, the one with the
    // strongest pivot element.  Bland mode falls back to exact minimal ratio
    // with lowest variable index.  Returns false when the direction is
    // unblocked.
    bool ratio_test(int q, int dir, bool phase1, bool bland, double& step, int& leaving,
                    int& leave_bound) {
        cands_.clear();

        auto consider = [&](int vid, double w_raw) {
            double w = dir * w_raw;
            if (std::fabs(w) < kPivotTol) return;
            double x = xval_[vid];
            double bound;
            int hit;
            if (phase1 && x < lb_[vid] - opts_.feas_tol) {
                if (w >= 0.0) return;  // moving further below
                bound = lb_[vid];
                hit = AT_LOWER;
            } else if (phase1 && x > ub_[vid] + opts_.feas_tol) {
                if (w <= 0.0) return;
                bound = ub_[vid];
                hit = AT_UPPER;
            } else if (w > 0.0) {
                if (lb_[vid] <= -kInf) return;
                bound = lb_[vid];
                hit = AT_LOWER;
            } else {
                if (ub_[vid] >= kInf) return;
                bound = ub_[vid];
                hit = AT_UPPER;
            }
            double t_exact = (x - bound) / w;
            double t_slack = (x - bound + (w > 0.0 ? opts_.feas_tol : -opts_.feas_tol)) / w;
            if (t_exact < 0.0) t_exact = 0.0;
            if (t_slack < 0.0) t_slack = 0.0;
            cands_.push_back({vid, w, t_exact, t_slack, hit});
        };

        for (int t0 = 0; t0 < s_; ++t0) consider(J_[t0], wj_raw_[t0]);
        for (int i : ws_touched_)
            if (covered_[i] && ws_[i] != 0.0) consider(n_ + i, ws_[i]);

        double self_range = ub_[q] - lb_[q];
        double t_limit = self_range < kInf ? self_range : kInf;
        for (const Cand& c : cands_) t_limit = std::min(t_limit, c.t_slack);
        if (t_limit >= kInf) return false;

        leaving = -1;
        if (bland) {
            double best_t = self_range;
            for (const Cand& c : cands_) {
                bool better = c.t_exact < best_t - 1e-12 ||
                              (c.t_exact <= best_t + 1e-12 && (leaving < 0 || c.vid < leaving));
                if (better) {
                    best_t = c.t_exact;
                    leaving = c.vid;
                    leave_bound = c.bound_hit;
                }
            }
            if (leaving < 0 && self_range < kInf) {
                leaving = q;
                step = self_range;
                return true;
            }
            step = std::max(0.0, best_t);
            return leaving >= 0;
        }

        double best_w = 0.0;
        double best_t = 0.0;
        for (const Cand& c : cands_) {
            if (c.t_exact > t_limit) continue;
            if (std::fabs(c.w) > std::fabs(best_w)) {
                best_w = c.w;
                best_t = c.t_exact;
                leaving = c.vid;
                leave_bound = c.bound_hit;
            }
        }
        if (leaving < 0) {
            // nothing blocks below the relaxed limit: flip the entering bound
            if (self_range >= kInf) return false;
            leaving = q;
            step = self_range;
            return true;
        }
        step = best_t;
        return true;
    }

    void apply_step(int q, int dir, double t) {
        if (t != 0.0) {
            for (int t0 = 0; t0 < s_; ++t0) xval_[J_[t0]] -= t * dir * wj_raw_[t0];
            for (int i : ws_touched_)
                if (covered_[i] && ws_[i] != 0.0) xval_[n_ + i] -= t * dir * ws_[i];
        }
        xval_[q] += dir * t;
    }

    // debug: residual of Kinv * A[R,J] vs the identity
    double kernel_residual() const {
        int s = s_;
        double worst = 0.0;
        std::vector<double> col(s);
        for (int t = 0; t < s; ++t) {
            std::fill(col.begin(), col.end(), 0.0);
            int j = J_[t];
            for (int e = col_start_[j]; e < col_start_[j + 1]; ++e)
                if (pos_in_R_[col_row_[e]] >= 0) col[pos_in_R_[col_row_[e]]] = col_val_[e];
            for (int r = 0; r < s; ++r) {
                double sum = 0.0;
                for (int p = 0; p < s; ++p)
                    sum += kinv_[static_cast<std::size_t>(r) * s + p] * col[p];
                worst = std::max(worst, std::fabs(sum - (r == t ? 1.0 : 0.0)));
            }
        }
        return worst;
    }

    void pivot(int q, int /*dir*/, int leaving, int leave_bound) {
        int pivot_case = (q < n_ ? 0 : 2) + (leaving < n_ ? 0 : 1);
        stat_[leaving] = leave_bound == AT_UPPER ? AT_UPPER : AT_LOWER;
        xval_[leaving] = leave_bound == AT_UPPER ? ub_[leaving] : lb_[leaving];
        stat_[q] = BASIC;
        if (paranoid_checks()) {
            do_pivot(q, leaving);
            double resid = kernel_residual();
            if (resid > 1e-6)
                std::fprintf(stderr, "kernel residual %.3e after case %d (q=%d leaving=%d s=%d)\n",
                             resid, pivot_case, q, leaving, s_);
            std::vector<double> stored = xval_;
            compute_x();
            double worst = 0.0;
            int worst_v = -1;
            for (int v = 0; v < nv_; ++v) {
                if (stat_[v] != BASIC) continue;
                double dv = std::fabs(stored[v] - xval_[v]);
                if (dv > worst) {
                    worst = dv;
                    worst_v = v;
                }
            }
            if (worst > 1e-6)
                std::fprintf(stderr,
                             "xval drift %.3e at var %d after case %d (q=%d leaving=%d s=%d)\n",
                             worst, worst_v, pivot_case, q, leaving, s_);
            xval_ = std::move(stored);
            return;
        }
        do_pivot(q, leaving);
    }

    void do_pivot(int q, int leaving) {

        bool q_structural = q < n_;
        bool l_structural = leaving < n_;

        if (q_structural && l_structural) {
            int t0 = pos_in_J_[leaving];
            double piv = wj_raw_[t0];
            if (std::fabs(piv) < kUpdateTol) {
                swap_in_J(leaving, q);
                hard_refactor();
                return;
            }
            // column replace: standard product-form update of the inverse
            int s = s_;
            double inv = 1.0 / piv;
            double* prow = &kinv_[static_cast<std::size_t>(t0) * s];
            for (int c = 0; c < s; ++c) prow[c] *= inv;
            for (int t = 0; t < s; ++t) {
                if (t == t0) continue;
                double f = wj_raw_[t];
                if (f == 0.0) continue;
                double* row = &kinv_[static_cast<std::size_t>(t) * s];
                for (int c = 0; c < s; ++c) row[c] -= f * prow[c];
            }
            pos_in_J_[leaving] = -1;
            pos_in_J_[q] = t0;
            J_[t0] = q;
            return;
        }

        if (q_structural && !l_structural) {
            // slack leaves: its row joins R, q joins J (bordered grow)
            int row_new = leaving - n_;
            grow_kernel(q, row_new);
            return;
        }

        if (!q_structural && l_structural) {
            // slack enters: its row becomes covered, a structural leaves;
            // the kernel loses row p and column t0
            int row_gone = q - n_;
            int t0 = pos_in_J_[leaving];
            int p = pos_in_R_[row_gone];
            int s = s_;
            double piv = kinv_[static_cast<std::size_t>(t0) * s + p];

            pos_in_J_[leaving] = -1;
            J_.erase(J_.begin() + t0);
            for (std::size_t t = 0; t < J_.size(); ++t) pos_in_J_[J_[t]] = static_cast<int>(t);
            covered_[row_gone] = 1;
            pos_in_R_[row_gone] = -1;
            R_.erase(R_.begin() + p);
            for (std::size_t r = 0; r < R_.size(); ++r) pos_in_R_[R_[r]] = static_cast<int>(r);

            if (std::fabs(piv) < kUpdateTol) {
                hard_refactor();
                return;
            }
            int s2 = s - 1;
            std::vector<double> nk(static_cast<std::size_t>(s2) * s2);
            double inv = 1.0 / piv;
            for (int t = 0, tn = 0; t < s; ++t) {
                if (t == t0) continue;
                double f = kinv_[static_cast<std::size_t>(t) * s + p] * inv;
                const double* src = &kinv_[static_cast<std::size_t>(t) * s];
                const double* prow = &kinv_[static_cast<std::size_t>(t0) * s];
                double* dst = &nk[static_cast<std::size_t>(tn) * s2];
                for (int r = 0, rn = 0; r < s; ++r) {
                    if (r == p) continue;
                    dst[rn++] = src[r] - f * prow[r];
                }
                ++tn;
            }
            kinv_ = std::move(nk);
            s_ = s2;
            return;
        }

        // slack enters, slack leaves: the kernel row of the leaving slack's
        // row replaces the entering slack's row (rank-1 row swap)
        int row_gone = q - n_;       // becomes covered
        int row_new = leaving - n_;  // becomes uncovered
        int s = s_;
        int p = pos_in_R_[row_gone];
        covered_[row_gone] = 1;
        covered_[row_new] = 0;
        pos_in_R_[row_gone] = -1;
        pos_in_R_[row_new] = p;
        R_[p] = row_new;

        // delta = A[row_new, J] - A[row_gone, J]
        std::vector<double> delta(s, 0.0);
        for (const LpRow* r : {&lp_.rows[row_new], &lp_.rows[row_gone]}) {
            double sgn = r == &lp_.rows[row_new] ? 1.0 : -1.0;
            for (std::size_t e = 0; e < r->cols.size(); ++e) {
                int c = r->cols[e];
                if (pos_in_J_[c] >= 0) delta[pos_in_J_[c]] += sgn * r->coefs[e];
            }
        }
        std::vector<double> g(s, 0.0);  // delta^T Kinv
        for (int t = 0; t < s; ++t) {
            double dt = delta[t];
            if (dt == 0.0) continue;
            const double* krow = &kinv_[static_cast<std::size_t>(t) * s];
            for (int c = 0; c < s; ++c) g[c] += dt * krow[c];
        }
        double denom = 1.0 + g[p];
        if (std::fabs(denom) < kUpdateTol) {
            hard_refactor();
            return;
        }
        std::vector<double> colp(s);
        for (int t = 0; t < s; ++t) colp[t] = kinv_[static_cast<std::size_t>(t) * s + p];
        double inv = 1.0 / denom;
        for (int t = 0; t < s; ++t) {
            double f = colp[t] * inv;
            if (f == 0.0) continue;
            double* krow = &kinv_[static_cast<std::size_t>(t) * s];
            for (int c = 0; c < s; ++c) krow[c] -= f * g[c];
        }
    }

    void swap_in_J(int leaving, int entering) {
        int t0 = pos_in_J_[leaving];
        pos_in_J_[leaving] = -1;
        pos_in_J_[entering] = t0;
        J_[t0] = entering;
    }

    void rebuild_R() {
        R_.clear();
        pos_in_R_.assign(m_, -1);
        for (int i = 0; i < m_; ++i)
            if (!covered_[i]) {
                pos_in_R_[i] = static_cast<int>(R_.size());
                R_.push_back(i);
            }
    }

    void hard_refactor() {
        if (!refactor()) {
            if (!recover()) throw SimplexError("singular basis after pivot");
            return;
        }
        compute_x();
    }

    // Bordered inverse update when row `row_new` joins R and column q joins J.
    void grow_kernel(int q, int row_new) {
        int s = s_;
        // v = A[row_new, J], alpha = A[row_new, q]
        std::vector<double> v(s, 0.0);
        double alpha = 0.0;
        const LpRow& r = lp_.rows[row_new];
        for (std::size_t e = 0; e < r.cols.size(); ++e) {
            int c = r.cols[e];
            if (c == q) alpha = r.coefs[e];
            else if (pos_in_J_[c] >= 0) v[pos_in_J_[c]] = r.coefs[e];
        }
        // u = Kinv * a_R = wj_raw_
        double vu = 0.0;
        for (int t = 0; t < s; ++t) vu += v[t] * wj_raw_[t];
        double sigma = alpha - vu;

        covered_[row_new] = 0;
        pos_in_R_[row_new] = s;
        R_.push_back(row_new);
        pos_in_J_[q] = s;
        J_.push_back(q);

        if (std::fabs(sigma) < kUpdateTol) {
            hard_refactor();
            return;
        }
        std::vector<double> p(s, 0.0);  // v^T Kinv
        for (int c = 0; c < s; ++c) {
            double sum = 0.0;
            for (int t = 0; t < s; ++t) sum += v[t] * kinv_[static_cast<std::size_t>(t) * s + c];
            p[c] = sum;
        }
        int s2 = s + 1;
        std::vector<double> nk(static_cast<std::size_t>(s2) * s2);
        double inv_sigma = 1.0 / sigma;
        for (int t = 0; t < s; ++t)
            for (int c = 0; c < s; ++c)
                nk[static_cast<std::size_t>(t) * s2 + c] =
                    kinv_[static_cast<std::size_t>(t) * s + c] + wj_raw_[t] * p[c] * inv_sigma;
        for (int t = 0; t < s; ++t) {
            nk[static_cast<std::size_t>(t) * s2 + s] = -wj_raw_[t] * inv_sigma;
            nk[static_cast<std::size_t>(s) * s2 + t] = -p[t] * inv_sigma;
        }
        nk[static_cast<std::size_t>(s) * s2 + s] = inv_sigma;
        kinv_ = std::move(nk);
        s_ = s2;
    }

    // ---- results ----------------------------------------------------------

    // LpResult contract: an Optimal result is primal feasible within tolerance.
    // A violation here means the factorization went numerically bad somewhere;
    // surfacing it lets the caller re-solve from scratch.
    void verify_primal() const {
        double tol = 100.0 * opts_.feas_tol;
        for (int j = 0; j < n_; ++j) {
            if (xval_[j] < lb_[j] - tol || xval_[j] > ub_[j] + tol)
                throw SimplexError("optimal point breaks column bound " + std::to_string(j) +
                                   " by " +
                                   std::to_string(std::max(lb_[j] - xval_[j], xval_[j] - ub_[j])));
        }
        for (int i = 0; i < m_; ++i) {
            const LpRow& r = lp_.rows[i];
            double act = 0.0;
            for (std::size_t t = 0; t < r.cols.size(); ++t)
                act += r.coefs[t] * xval_[r.cols[t]];
            double slack = r.rhs - act;
            double scale = tol * std::max(1.0, std::fabs(r.rhs));
            if (slack < lb_[n_ + i] - scale || slack > ub_[n_ + i] + scale)
                throw SimplexError("optimal point breaks row " + std::to_string(i) + " by " +
                                   std::to_string(std::max(lb_[n_ + i] - slack,
                                                           slack - ub_[n_ + i])));
        }
    }

    LpResult make_optimal(long long iters) {
        verify_primal();
        LpResult res;
        res.status = LpStatus::Optimal;
        res.iterations = iters;
        res.x.assign(xval_.begin(), xval_.begin() + n_);
        double obj = 0.0;
        for (int j = 0; j < n_; ++j) obj += lp_.obj[j] * res.x[j];
        res.objective = obj;
        compute_duals(false);
        res.y = y_;
        res.dj.resize(n_);
        for (int j = 0; j < n_; ++j) res.dj[j] = reduced_cost(j, false);
        res.basis = save_basis();
        return res;
    }

    LpResult make_infeasible(long long iters) {
        LpResult res;
        res.status = LpStatus::Infeasible;
        res.iterations = iters;
        res.basis = save_basis();
        return res;
    }

    LpBasis save_basis() const {
        LpBasis b;
        b.basic_of_row.resize(m_);
        b.at_upper.assign(nv_, 0);
        for (int i = 0; i < m_; ++i)
            if (covered_[i]) b.basic_of_row[i] = n_ + i;
        for (int p = 0; p < static_cast<int>(R_.size()); ++p)
            b.basic_of_row[R_[p]] = J_[p];
        for (int v = 0; v < nv_; ++v)
            if (stat_[v] == AT_UPPER) b.at_upper[v] = 1;
        return b;
    }

    const LinearProgram& lp_;
    SimplexOptions opts_;
    int n_ = 0, m_ = 0, nv_ = 0;
    int s_ = 0;
    int recoveries_ = 0;
    bool phase1_ = true;

    std::vector<int> col_start_, col_row_;
    std::vector<double> col_val_;
    std::vector<double> lb_, ub_;

    std::vector<std::uint8_t> stat_;
    std::vector<double> xval_;
    std::vector<int> J_, R_, pos_in_J_, pos_in_R_;
    std::vector<std::uint8_t> covered_;
    std::vector<double> kinv_;

    std::vector<double> y_, aR_, wj_raw_, ws_, vtmp_;
    std::vector<int> ws_touched_;
    std::vector<std::uint8_t> ws_mark_;

    struct Cand {
        int vid;
        double w;        // folded direction: x moves at rate -w
        double t_exact;  // exact ratio to the blocking bound
        double t_slack;  // ratio with the bound relaxed by feas_tol
        int bound_hit;
    };
    std::vector<Cand> cands_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const LpBasis* warm, const SimplexOptions& opts) {
    Engine engine(lp, opts);
    return engine.run(warm);
}

}  // namespace balpart
