#include "balpart/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace balpart {

int EdgeVarMap::active_count() const {
    int c = 0;
    for (FixReason r : fix_reason)
        if (r == FixReason::None) ++c;
    return c;
}

std::string ModelStats::to_text() const {
    std::ostringstream os;
    os << "columns:              " << columns << "\n"
       << "active columns:       " << active_columns << "\n"
       << "fixed (dummy pair):   " << fixed_dummy << "\n"
       << "fixed (forbidden):    " << fixed_forbidden << "\n"
       << "fixed (overweight):   " << fixed_overflow << "\n"
       << "cardinality rows:     " << cardinality_rows << "\n"
       << "weight rows:          " << weight_rows << "\n"
       << "intra-edge rows:      " << beta_rows << "\n"
       << "triangle rows in LP:  " << triangle_rows_materialized << "\n"
       << "triangle pool:        " << triangle_pool_size << "\n"
       << "triangle redundant:   " << triangle_redundant << "\n";
    return os.str();
}

namespace {

std::array<double, 3> tri_coefs(std::uint8_t type) {
    // coefficient order: (x_ij, x_jl, x_il)
    switch (type) {
        case 0: return {1.0, 1.0, -1.0};
        case 1: return {1.0, -1.0, 1.0};
        default: return {-1.0, 1.0, 1.0};
    }
}

double tri_key(const Instance& inst, int i, int j, int l, std::uint8_t type) {
    switch (type) {
        case 0: return inst.d(i, j) + inst.d(j, l);
        case 1: return inst.d(i, j) + inst.d(i, l);
        default: return inst.d(j, l) + inst.d(i, l);
    }
}

bool tri_redundant(const EdgeVarMap& vars, int i, int j, int l, std::uint8_t type) {
    int cij = vars.col(i, j), cjl = vars.col(j, l), cil = vars.col(i, l);
    switch (type) {
        case 0: return vars.fixed(cij) || vars.fixed(cjl);
        case 1: return vars.fixed(cij) || vars.fixed(cil);
        default: return vars.fixed(cjl) || vars.fixed(cil);
    }
}

}  // namespace

LpRow Model::pool_row(int pool_idx) const {
    const TriRow& t = pool.rows[pool_idx];
    auto c = tri_coefs(t.type);
    LpRow row;
    row.cols = {vars.col(t.i, t.j), vars.col(t.j, t.l), vars.col(t.i, t.l)};
    row.coefs = {c[0], c[1], c[2]};
    row.rel = Relation::LE;
    row.rhs = 1.0;
    return row;
}

Model build_model(const Instance& inst, const ModelConfig& cfg) {
    inst.validate();
    if (cfg.formulation == Formulation::F1 && inst.n % inst.k != 0)
        throw std::invalid_argument("build_model: F1 needs k | n (apply add_dummies first)");

    Model m;
    m.inst = inst;
    m.cfg = cfg;

    int n = inst.n;
    m.vars.n = n;
    m.vars.fix_reason.assign(edge_count(n), FixReason::None);

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            int col = m.lp.add_col(inst.d(i, j), 0.0, 1.0);
            FixReason reason = FixReason::None;
            if (inst.is_dummy(i) && inst.is_dummy(j))
                reason = FixReason::DummyPair;
            else if (inst.is_forbidden(i, j))
                reason = FixReason::ForbiddenEdge;
            else if (inst.weights[i] + inst.weights[j] > inst.wu)
                reason = FixReason::WeightOverflow;
            if (reason != FixReason::None) {
                m.lp.set_bounds(col, 0.0, 0.0);
                m.vars.fix_reason[col] = reason;
                switch (reason) {
                    case FixReason::DummyPair: ++m.stats.fixed_dummy; break;
                    case FixReason::ForbiddenEdge: ++m.stats.fixed_forbidden; break;
                    default: ++m.stats.fixed_overflow; break;
                }
            }
        }
    m.stats.columns = m.lp.ncols;
    m.stats.active_columns = m.vars.active_count();

    SizeBounds sb = size_bounds(inst);

    // cardinality rows
    for (int i = 0; i < n; ++i) {
        LpRow base;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            base.cols.push_back(m.vars.col(i, j));
            base.coefs.push_back(1.0);
        }
        if (n % inst.k == 0) {
            base.rel = Relation::EQ;
            base.rhs = static_cast<double>(n / inst.k - 1);
            m.lp.append_row(base);
            ++m.stats.cardinality_rows;
        } else {
            LpRow lo = base;
            lo.rel = Relation::GE;
            lo.rhs = static_cast<double>(sb.floor_size - 1);
            m.lp.append_row(std::move(lo));
            base.rel = Relation::LE;
            base.rhs = static_cast<double>(sb.ceil_size - 1);
            m.lp.append_row(std::move(base));
            m.stats.cardinality_rows += 2;
        }
    }

    // weight rows: wl <= w_i + sum_j w_j x_ij <= wu, two rows per node
    for (int i = 0; i < n; ++i) {
        LpRow base;
        for (int j = 0; j < n; ++j) {
            if (j == i || inst.weights[j] == 0.0) continue;
            base.cols.push_back(m.vars.col(i, j));
            base.coefs.push_back(inst.weights[j]);
        }
        LpRow lo = base;
        lo.rel = Relation::GE;
        lo.rhs = inst.wl - inst.weights[i];
        m.lp.append_row(std::move(lo));
        base.rel = Relation::LE;
        base.rhs = inst.wu - inst.weights[i];
        m.lp.append_row(std::move(base));
        m.stats.weight_rows += 2;
    }

    if (cfg.formulation == Formulation::F2) {
        LpRow beta;
        for (int c = 0; c < m.lp.ncols; ++c) {
            beta.cols.push_back(c);
            beta.coefs.push_back(1.0);
        }
        beta.rel = Relation::EQ;
        beta.rhs = static_cast<double>(sb.intra_edges);
        m.lp.append_row(std::move(beta));
        ++m.stats.beta_rows;
    }

    // triangle pool, ordered by (key, i, j, l, type) and cut into ten deciles
    // of near-equal size (later deciles take the remainder)
    auto& rows = m.pool.rows;
    rows.reserve(static_cast<std::size_t>(n) * (n - 1) * (n - 2) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int l = j + 1; l < n; ++l)
                for (std::uint8_t type = 0; type < 3; ++type) {
                    TriRow t{i, j, l, type, tri_key(inst, i, j, l, type), 0,
                             tri_redundant(m.vars, i, j, l, type)};
                    rows.push_back(t);
                }
    std::sort(rows.begin(), rows.end(), [](const TriRow& a, const TriRow& b) {
        if (a.key != b.key) return a.key < b.key;
        if (a.i != b.i) return a.i < b.i;
        if (a.j != b.j) return a.j < b.j;
        if (a.l != b.l) return a.l < b.l;
        return a.type < b.type;
    });
    std::size_t total = rows.size();
    std::size_t base_sz = total / 10, rem = total % 10;
    std::size_t pos = 0;
    for (int r = 1; r <= 10; ++r) {
        std::size_t sz = base_sz + (static_cast<std::size_t>(r) > 10 - rem ? 1 : 0);
        for (std::size_t t = 0; t < sz; ++t) rows[pos++].decile = r;
    }
    m.stats.triangle_pool_size = static_cast<int>(total);
    for (const TriRow& t : rows)
        if (t.redundant) ++m.stats.triangle_redundant;

    m.pool_in_lp.assign(total, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        const TriRow& t = rows[idx];
        if (t.redundant || !cfg.initial_deciles.count(t.decile)) continue;
        m.lp.append_row(m.pool_row(static_cast<int>(idx)));
        m.pool_in_lp[idx] = 1;
        ++m.stats.triangle_rows_materialized;
    }
    return m;
}

std::vector<int> separate_triangles(const Model& model, const std::vector<char>& in_lp,
                                    std::span<const double> x, SepContext context) {
    int lo = 3, hi = 10;
    double threshold;
    if (context == SepContext::Integer) {
        threshold = kFeasTol;
    } else {
        threshold = model.cfg.cut_violation_threshold;
        hi = context == SepContext::RootFractional ? model.cfg.fractional_decile_limit_root
                                                   : model.cfg.fractional_decile_limit_tree;
    }
    std::vector<int> out;
    const auto& rows = model.pool.rows;
    for (std::size_t idx = 0; idx < rows.size(); ++idx) {
        const TriRow& t = rows[idx];
        if (t.redundant || in_lp[idx]) continue;
        if (t.decile < lo || t.decile > hi) continue;
        auto c = tri_coefs(t.type);
        double lhs = c[0] * x[model.vars.col(t.i, t.j)] + c[1] * x[model.vars.col(t.j, t.l)] +
                     c[2] * x[model.vars.col(t.i, t.l)];
        if (lhs - 1.0 >= threshold) out.push_back(static_cast<int>(idx));
    }
    return out;
}

// ---- LP file writer / reader ---------------------------------------------

namespace {

std::string var_name(int i, int j) {
    return "x_" + std::to_string(i) + "_" + std::to_string(j);
}

void write_terms(std::ostream& os, const LpRow& row, const EdgeVarMap& vars) {
    for (std::size_t t = 0; t < row.cols.size(); ++t) {
        auto [i, j] = vars.nodes(row.cols[t]);
        double c = row.coefs[t];
        os << (c < 0 ? " - " : " + ");
        double a = std::fabs(c);
        if (a != 1.0) os << a << " ";
        os << var_name(i, j);
    }
}

}  // namespace

void export_lp_file(const Instance& inst, Formulation formulation, const std::string& path) {
    ModelConfig cfg;
    cfg.formulation = formulation;
    Model m = build_model(inst, cfg);  // all deciles materialized by default

    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os.precision(17);
    os << "\\ balanced k-way partition model, n=" << inst.n << " k=" << inst.k << "\n";
    os << "Minimize\n obj:";
    bool first = true;
    for (int c = 0; c < m.lp.ncols; ++c) {
        auto [i, j] = m.vars.nodes(c);
        double coef = m.lp.obj[c];
        os << (first && coef >= 0 ? " " : (coef < 0 ? " - " : " + "));
        os << std::fabs(coef) << " " << var_name(i, j);
        first = false;
    }
    os << "\nSubject To\n";
    int row_id = 0;
    for (const LpRow& row : m.lp.rows) {
        os << " c" << row_id++ << ":";
        write_terms(os, row, m.vars);
        os << (row.rel == Relation::LE ? " <= " : row.rel == Relation::GE ? " >= " : " = ");
        os << row.rhs << "\n";
    }
    os << "Bounds\n";
    for (int c = 0; c < m.lp.ncols; ++c) {
        auto [i, j] = m.vars.nodes(c);
        if (m.lp.ub[c] == 0.0)
            os << " " << var_name(i, j) << " = 0\n";
        else
            os << " 0 <= " << var_name(i, j) << " <= 1\n";
    }
    os << "Binaries\n";
    for (int c = 0; c < m.lp.ncols; ++c) {
        auto [i, j] = m.vars.nodes(c);
        os << " " << var_name(i, j) << "\n";
    }
    os << "End\n";
    if (!os) throw std::runtime_error("write failed: " + path);
}

namespace {

struct Tokenizer {
    std::vector<std::string> tokens;
    std::size_t pos = 0;

    explicit Tokenizer(std::istream& in) {
        std::string line;
        while (std::getline(in, line)) {
            auto cut = line.find('\\');
            if (cut != std::string::npos) line.erase(cut);
            std::string tok;
            auto flush = [&]() {
                if (!tok.empty()) {
                    tokens.push_back(tok);
                    tok.clear();
                }
            };
            for (char ch : line) {
                if (std::isspace(static_cast<unsigned char>(ch))) {
                    flush();
                } else if (ch == '+' || ch == '-' || ch == ':' || ch == '<' || ch == '>') {
                    flush();
                    tokens.push_back(std::string(1, ch));
                } else if (ch == '=') {
                    flush();
                    if (!tokens.empty() && (tokens.back() == "<" || tokens.back() == ">"))
                        tokens.back() += '=';
                    else
                        tokens.push_back("=");
                } else {
                    tok += ch;
                }
            }
            flush();
        }
    }

    bool done() const { return pos >= tokens.size(); }
    const std::string& peek() const { return tokens[pos]; }
    std::string take() { return tokens[pos++]; }
};

bool is_number(const std::string& s) {
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end && *end == '\0' && end != s.c_str();
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

ParsedLp read_lp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Tokenizer tz(in);
    ParsedLp lp;

    enum Section { NONE, OBJ, ROWS, BOUNDS, BIN } section = NONE;
    std::map<std::string, double>* terms = nullptr;
    ParsedLp::Row* current = nullptr;
    double sign = 1.0;
    double pending_coef = 1.0;
    bool have_coef = false;
    bool after_rel = false;

    auto reset_expr = [&]() {
        sign = 1.0;
        pending_coef = 1.0;
        have_coef = false;
        after_rel = false;
    };
    auto flush_row = [&]() {
        current = nullptr;
        terms = nullptr;
        reset_expr();
    };

    while (!tz.done()) {
        std::string t = tz.take();
        std::string lt = lower(t);
        if (section != BOUNDS || !is_number(t)) {
            if (lt == "minimize" || lt == "min") {
                section = OBJ;
                flush_row();
                terms = &lp.objective;
                continue;
            }
            if (lt == "subject") {
                if (!tz.done() && lower(tz.peek()) == "to") tz.take();
                section = ROWS;
                flush_row();
                continue;
            }
            if (lt == "st" || lt == "s.t.") {
                section = ROWS;
                flush_row();
                continue;
            }
            if (lt == "bounds") {
                section = BOUNDS;
                flush_row();
                continue;
            }
            if (lt == "binaries" || lt == "binary" || lt == "bin") {
                section = BIN;
                flush_row();
                continue;
            }
            if (lt == "end") break;
        }

        switch (section) {
            case OBJ:
            case ROWS: {
                if (!tz.done() && tz.peek() == ":") {
                    // label introducing the objective or a new row
                    tz.take();
                    if (section == ROWS) {
                        lp.rows.emplace_back();
                        current = &lp.rows.back();
                        current->name = t;
                        terms = &current->terms;
                        reset_expr();
                    }
                    continue;
                }
                if (t == "+") {
                    sign = 1.0;
                    continue;
                }
                if (t == "-") {
                    sign = -1.0;
                    continue;
                }
                if (t == "<=" || t == "<") {
                    if (current) current->rel = Relation::LE;
                    after_rel = true;
                    continue;
                }
                if (t == ">=" || t == ">") {
                    if (current) current->rel = Relation::GE;
                    after_rel = true;
                    continue;
                }
                if (t == "=") {
                    if (current) current->rel = Relation::EQ;
                    after_rel = true;
                    continue;
                }
                if (is_number(t)) {
                    if (after_rel) {
                        if (current) current->rhs = sign * std::stod(t);
                        flush_row();
                        continue;
                    }
                    pending_coef = std::stod(t);
                    have_coef = true;
                    continue;
                }
                if (terms) {
                    (*terms)[t] += sign * (have_coef ? pending_coef : 1.0);
                    sign = 1.0;
                    pending_coef = 1.0;
                    have_coef = false;
                }
                break;
            }
            case BOUNDS: {
                // forms: "lo <= var <= hi" or "var = v"
                if (is_number(t)) {
                    double lo = std::stod(t);
                    tz.take();  // <=
                    std::string var = tz.take();
                    tz.take();  // <=
                    double hi = std::stod(tz.take());
                    lp.bounds[var] = {lo, hi};
                } else {
                    std::string var = t;
                    tz.take();  // =
                    double v = std::stod(tz.take());
                    lp.bounds[var] = {v, v};
                }
                break;
            }
            case BIN:
                lp.binaries.insert(t);
                break;
            case NONE:
                break;
        }
    }
    return lp;
}

}  // namespace balpart
