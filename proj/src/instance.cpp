#include "balpart/instance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "balpart/rng.hpp"

namespace balpart {

bool Instance::is_forbidden(int i, int j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(forbidden.begin(), forbidden.end(), std::make_pair(i, j));
}

double Instance::total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

void Instance::validate() const {
    if (k < 2) throw std::invalid_argument("instance: k must be >= 2");
    if (n < 2 * k) throw std::invalid_argument("instance: n must be >= 2k");
    if (static_cast<int>(weights.size()) != n)
        throw std::invalid_argument("instance: weights size mismatch");
    if (dist.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("instance: dist size mismatch");
    if (wl > wu) throw std::invalid_argument("instance: wl > wu");
    if (dummy_count < 0 || dummy_count >= n)
        throw std::invalid_argument("instance: bad dummy_count");
    for (int i = 0; i < n; ++i) {
        if (weights[i] < 0.0) throw std::invalid_argument("instance: negative weight");
        if (d(i, i) != 0.0) throw std::invalid_argument("instance: nonzero diagonal");
        for (int j = i + 1; j < n; ++j) {
            if (d(i, j) < 0.0) throw std::invalid_argument("instance: negative distance");
            if (d(i, j) != d(j, i)) throw std::invalid_argument("instance: asymmetric distance");
        }
    }
    for (int v = n - dummy_count; v < n; ++v) {
        if (weights[v] != 0.0) throw std::invalid_argument("instance: dummy with weight");
        for (int u = 0; u < n; ++u)
            if (d(v, u) != 0.0) throw std::invalid_argument("instance: dummy with distance");
    }
    for (std::size_t t = 0; t < forbidden.size(); ++t) {
        auto [i, j] = forbidden[t];
        if (i < 0 || j >= n || i >= j) throw std::invalid_argument("instance: bad forbidden pair");
        if (t > 0 && forbidden[t] <= forbidden[t - 1])
            throw std::invalid_argument("instance: forbidden pairs not sorted/unique");
    }
}

SizeBounds size_bounds(int n, int k) {
    SizeBounds sb;
    sb.floor_size = n / k;
    sb.big_classes = n % k;
    sb.ceil_size = sb.floor_size + (sb.big_classes ? 1 : 0);
    auto pairs = [](long long s) { return s * (s - 1) / 2; };
    sb.intra_edges = sb.big_classes * pairs(sb.ceil_size) +
                     static_cast<long long>(k - sb.big_classes) * pairs(sb.floor_size);
    return sb;
}

Instance generate_random(int n, int k, std::uint64_t seed) {
    if (k < 2 || n < 2 * k) throw std::invalid_argument("generate_random: need k >= 2 and n >= 2k");
    SplitMix64 rng(seed);
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = rng.uniform(-100.0, 100.0);
        ys[i] = rng.uniform(-100.0, 100.0);
    }
    Instance inst;
    inst.n = n;
    inst.k = k;
    inst.weights.resize(n);
    for (int i = 0; i < n; ++i) inst.weights[i] = rng.uniform(0.1, 0.9);
    inst.dist.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            inst.set_d(i, j, std::hypot(xs[i] - xs[j], ys[i] - ys[j]));
    double mu = inst.total_weight() / n;
    double var = 0.0;
    for (double w : inst.weights) var += (w - mu) * (w - mu);
    double sigma = std::sqrt(var / n);  // population formula
    double center = mu * (static_cast<double>(n) / k);
    inst.wl = center - sigma;
    inst.wu = center + sigma;
    return inst;
}

bool check_necessary_feasibility(const Instance& inst) {
    double total = inst.total_weight();
    double lo = 2.0;
    if (inst.wu > 0.0) {
        lo = std::max(lo, std::ceil(total / inst.wu));
    } else if (total > 0.0) {
        return false;  // positive weight cannot fit in zero-capacity classes
    }
    double hi = std::floor(inst.n / 2.0);
    if (inst.wl > 0.0) hi = std::min(hi, std::floor(total / inst.wl));
    return lo <= inst.k && inst.k <= hi;
}

Instance add_dummies(const Instance& inst) {
    if (inst.n % inst.k == 0)
        throw std::invalid_argument("add_dummies: k already divides n");
    int extra = inst.k - inst.n % inst.k;
    int m = inst.n + extra;
    Instance out;
    out.n = m;
    out.k = inst.k;
    out.wl = inst.wl;
    out.wu = inst.wu;
    out.dummy_count = extra;
    out.weights = inst.weights;
    out.weights.resize(m, 0.0);
    out.dist.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < inst.n; ++i)
        for (int j = i + 1; j < inst.n; ++j)
            out.set_d(i, j, inst.d(i, j));
    out.forbidden = inst.forbidden;
    for (int i = inst.n; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            out.forbidden.emplace_back(i, j);
    std::sort(out.forbidden.begin(), out.forbidden.end());
    return out;
}

}  // namespace balpart
