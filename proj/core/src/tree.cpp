#include "fadbio/learn/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fadbio {

namespace {

constexpr int kDepthCap = 32;
constexpr double kGainEps = 1e-12;

}  // namespace

std::span<const double> Tree::predict_row(std::span<const double> x) const {
    std::size_t leaf = leaf_index(x);
    const TreeNode& n = nodes[leaf];
    return {values.data() + n.value_at, static_cast<std::size_t>(value_width)};
}

std::size_t Tree::leaf_index(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const TreeNode& n = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold
                                         ? n.left
                                         : n.right);
    }
    return i;
}

std::size_t Tree::n_leaves() const {
    std::size_t c = 0;
    for (const TreeNode& n : nodes) c += n.feature < 0;
    return c;
}

std::size_t resolve_max_features(std::string_view spec, std::size_t p) {
    if (spec == "none" || spec.empty()) return 0;
    if (spec == "sqrt") return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(p))));
    if (spec == "log2") return std::max<std::size_t>(1, static_cast<std::size_t>(std::log2(double(p))));
    throw std::invalid_argument("unknown max_features value: " + std::string(spec));
}

Presorted presort(const ColMatrix& x) {
    Presorted s;
    s.n = x.n;
    s.p = x.p;
    s.order.resize(x.n * x.p);
    for (std::size_t f = 0; f < x.p; ++f) {
        std::uint32_t* col = s.order.data() + f * x.n;
        std::iota(col, col + x.n, 0u);
        const double* xv = x.v.data() + f * x.n;
        std::sort(col, col + x.n, [xv](std::uint32_t a, std::uint32_t b) {
            return xv[a] < xv[b] || (xv[a] == xv[b] && a < b);
        });
    }
    return s;
}

namespace {

// Shared state for growing one tree. Rows are matrix-local ids; the arena
// holds, for every candidate feature, the active rows sorted by that feature,
// and gets partitioned in place as nodes split.
struct Grower {
    Grower(const ColMatrix& m, SplitCriterion c, double lam, int width)
        : x(m), crit(c), lambda(lam), k(width) {}

    const ColMatrix& x;
    SplitCriterion crit;
    double lambda = 0.0;
    int k = 1;  // leaf payload width

    std::vector<double> g, h, wc;  // per-row gradient, hessian, counting weight
    std::vector<int> label;        // gini mode
    std::vector<std::uint32_t> allowed;

    std::size_t n_act = 0;
    std::vector<std::uint32_t> arena;    // allowed.size() blocks of n_act ids
    std::vector<std::uint32_t> scratch;  // partition buffer
    std::vector<std::uint32_t> feat_buf;

    int max_depth = kDepthCap;
    double min_split = 2, min_leaf = 1;
    std::size_t max_features = 0;
    Rng* rng = nullptr;

    Tree tree;

    std::span<const std::uint32_t> segment(std::size_t slot, std::size_t lo,
                                           std::size_t hi) const {
        return {arena.data() + slot * n_act + lo, hi - lo};
    }

    struct NodeStats {
        double w = 0, gsum = 0, hsum = 0;
        double cls[3] = {0, 0, 0};
        double score(SplitCriterion c, double lambda) const {
            if (c == SplitCriterion::Gini) {
                double s = 0;
                for (double v : cls) s += v * v;
                return w > 0 ? s / w : 0.0;
            }
            return gsum * gsum / (hsum + lambda);
        }
    };

    NodeStats stats_of(std::span<const std::uint32_t> rows) const {
        NodeStats s;
        for (std::uint32_t r : rows) {
            s.w += wc[r];
            if (crit == SplitCriterion::Gini) {
                s.cls[label[r]] += wc[r];
            } else {
                s.gsum += g[r];
                s.hsum += h[r];
            }
        }
        return s;
    }

    std::int32_t make_leaf(const NodeStats& s) {
        TreeNode node;
        node.value_at = static_cast<std::int32_t>(tree.values.size());
        if (crit == SplitCriterion::Gini) {
            for (int c = 0; c < k; ++c) tree.values.push_back(s.w > 0 ? s.cls[c] / s.w : 0.0);
        } else {
            tree.values.push_back(-s.gsum / (s.hsum + lambda));
        }
        tree.nodes.push_back(node);
        return static_cast<std::int32_t>(tree.nodes.size() - 1);
    }

    // Scans ordered rows of one feature; updates the incumbent best split.
    void scan(std::size_t slot, std::size_t lo, std::size_t hi, const NodeStats& parent,
              double parent_score, double& best_gain, std::int64_t& best_feat,
              double& best_thr) const {
        const std::uint32_t* rows = arena.data() + slot * n_act;
        const std::size_t feat = allowed[slot];
        const double* xv = x.v.data() + feat * x.n;
        NodeStats left;
        for (std::size_t j = lo; j + 1 < hi; ++j) {
            const std::uint32_t r = rows[j];
            left.w += wc[r];
            if (crit == SplitCriterion::Gini) {
                left.cls[label[r]] += wc[r];
            } else {
                left.gsum += g[r];
                left.hsum += h[r];
            }
            const double a = xv[r], b = xv[rows[j + 1]];
            if (!(b > a)) continue;
            const double wr = parent.w - left.w;
            if (left.w < min_leaf || wr < min_leaf) continue;
            double gain;
            if (crit == SplitCriterion::Gini) {
                double sl = 0, sr = 0;
                for (int c = 0; c < k; ++c) {
                    sl += left.cls[c] * left.cls[c];
                    const double rc = parent.cls[c] - left.cls[c];
                    sr += rc * rc;
                }
                gain = sl / left.w + sr / wr - parent_score;
            } else {
                const double gr = parent.gsum - left.gsum;
                const double hr = parent.hsum - left.hsum;
                gain = left.gsum * left.gsum / (left.hsum + lambda) + gr * gr / (hr + lambda) -
                       parent_score;
            }
            if (gain > best_gain) {
                double thr = a + (b - a) * 0.5;
                if (thr == b) thr = a;
                best_gain = gain;
                best_feat = static_cast<std::int64_t>(slot);
                best_thr = thr;
            }
        }
    }

    // The slots (indices into `allowed`) examined at one node.
    std::span<const std::uint32_t> node_slots() {
        const std::size_t total = allowed.size();
        if (max_features == 0 || max_features >= total) {
            feat_buf.resize(total);
            std::iota(feat_buf.begin(), feat_buf.end(), 0u);
            return feat_buf;
        }
        feat_buf.resize(total);
        std::iota(feat_buf.begin(), feat_buf.end(), 0u);
        for (std::size_t i = 0; i < max_features; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng->below(total - i));
            std::swap(feat_buf[i], feat_buf[j]);
        }
        feat_buf.resize(max_features);
        std::sort(feat_buf.begin(), feat_buf.end());
        return feat_buf;
    }

    std::int32_t build(std::size_t lo, std::size_t hi, int depth) {
        const NodeStats parent = stats_of(segment(0, lo, hi));
        const double parent_score = parent.score(crit, lambda);

        bool splittable = depth < max_depth && parent.w >= min_split &&
                          parent.w >= 2 * min_leaf && hi - lo >= 2;
        double best_gain = kGainEps * std::max(1.0, std::fabs(parent_score));
        std::int64_t best_slot = -1;
        double best_thr = 0.0;
        if (splittable) {
            for (std::uint32_t slot : node_slots())
                scan(slot, lo, hi, parent, parent_score, best_gain, best_slot, best_thr);
        }
        if (best_slot < 0) return make_leaf(parent);

        const std::size_t split_feat = allowed[static_cast<std::size_t>(best_slot)];
        const double* xv = x.v.data() + split_feat * x.n;

        // Stable two-way partition of every feature arena on the chosen test.
        std::size_t n_left = 0;
        for (std::size_t slot = 0; slot < allowed.size(); ++slot) {
            std::uint32_t* seg = arena.data() + slot * n_act + lo;
            const std::size_t len = hi - lo;
            std::size_t nl = 0, nr = 0;
            for (std::size_t j = 0; j < len; ++j) {
                const std::uint32_t r = seg[j];
                if (xv[r] <= best_thr)
                    seg[nl++] = r;
                else
                    scratch[nr++] = r;
            }
            std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(nr),
                      seg + nl);
            n_left = nl;
        }

        const std::int32_t self = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[static_cast<std::size_t>(self)].feature =
            static_cast<std::int32_t>(split_feat);
        tree.nodes[static_cast<std::size_t>(self)].threshold = best_thr;
        const std::int32_t left_id = build(lo, lo + n_left, depth + 1);
        const std::int32_t right_id = build(lo + n_left, hi, depth + 1);
        tree.nodes[static_cast<std::size_t>(self)].left = left_id;
        tree.nodes[static_cast<std::size_t>(self)].right = right_id;
        return self;
    }
};

void check_problem(const ColMatrix& x, const TreeProblem& prob) {
    const std::size_t n = x.n;
    if (n == 0 || x.p == 0) throw std::invalid_argument("tree: empty training matrix");
    if (!prob.weight.empty() && prob.weight.size() != n)
        throw std::invalid_argument("tree: weight size mismatch");
    switch (prob.criterion) {
        case SplitCriterion::Gini:
            if (prob.labels.size() != n) throw std::invalid_argument("tree: labels size mismatch");
            if (prob.n_classes < 2 || prob.n_classes > 3)
                throw std::invalid_argument("tree: unsupported class count");
            break;
        case SplitCriterion::Variance:
            if (prob.target.size() != n) throw std::invalid_argument("tree: target size mismatch");
            break;
        case SplitCriterion::SecondOrder:
            if (prob.grad.size() != n || prob.hess.size() != n)
                throw std::invalid_argument("tree: gradient size mismatch");
            break;
    }
}

}  // namespace

Tree fit_tree(const ColMatrix& x, const Presorted& sorted, const TreeProblem& problem,
              const TreeGrowth& growth, Rng& rng) {
    check_problem(x, problem);
    if (sorted.n != x.n || sorted.p != x.p)
        throw std::invalid_argument("tree: presort does not match matrix");
    if (growth.max_depth && *growth.max_depth < 0)
        throw std::invalid_argument("tree: negative max_depth");

    Grower gw(x, problem.criterion, problem.lambda,
              problem.criterion == SplitCriterion::Gini ? problem.n_classes : 1);
    gw.max_depth = growth.max_depth ? std::min(*growth.max_depth, kDepthCap) : kDepthCap;
    gw.min_split = growth.min_samples_split;
    gw.min_leaf = growth.min_samples_leaf;
    gw.max_features = growth.max_features;
    gw.rng = &rng;

    const std::size_t n = x.n;
    gw.wc.resize(n);
    for (std::size_t r = 0; r < n; ++r)
        gw.wc[r] = problem.weight.empty() ? 1.0 : problem.weight[r];

    switch (problem.criterion) {
        case SplitCriterion::Gini:
            gw.label.assign(problem.labels.begin(), problem.labels.end());
            break;
        case SplitCriterion::Variance:
            // Squared-error reduction is the zero-lambda second-order gain on
            // g = -w*y, h = w; the leaf -sum(g)/sum(h) is the weighted mean.
            gw.g.resize(n);
            gw.h.resize(n);
            for (std::size_t r = 0; r < n; ++r) {
                gw.g[r] = -gw.wc[r] * problem.target[r];
                gw.h[r] = gw.wc[r];
            }
            gw.lambda = 0.0;
            break;
        case SplitCriterion::SecondOrder:
            gw.g.resize(n);
            gw.h.resize(n);
            for (std::size_t r = 0; r < n; ++r) {
                gw.g[r] = gw.wc[r] * problem.grad[r];
                gw.h[r] = gw.wc[r] * problem.hess[r];
            }
            break;
    }

    if (problem.allowed_features.empty()) {
        gw.allowed.resize(x.p);
        std::iota(gw.allowed.begin(), gw.allowed.end(), 0u);
    } else {
        gw.allowed.assign(problem.allowed_features.begin(), problem.allowed_features.end());
        for (std::uint32_t f : gw.allowed)
            if (f >= x.p) throw std::invalid_argument("tree: feature index out of range");
    }

    std::vector<std::uint32_t> active;
    active.reserve(n);
    for (std::uint32_t r = 0; r < n; ++r)
        if (gw.wc[r] > 0) active.push_back(r);
    if (active.empty()) throw std::invalid_argument("tree: no rows with positive weight");
    gw.n_act = active.size();

    std::vector<char> is_active(n, 0);
    for (std::uint32_t r : active) is_active[r] = 1;
    gw.arena.resize(gw.allowed.size() * gw.n_act);
    for (std::size_t slot = 0; slot < gw.allowed.size(); ++slot) {
        std::span<const std::uint32_t> col = sorted.column(gw.allowed[slot]);
        std::uint32_t* dst = gw.arena.data() + slot * gw.n_act;
        std::size_t k = 0;
        for (std::uint32_t r : col)
            if (is_active[r]) dst[k++] = r;
    }
    gw.scratch.resize(gw.n_act);

    gw.tree.value_width = gw.k;
    gw.build(0, gw.n_act, 0);
    return std::move(gw.tree);
}

std::optional<SplitEval> best_split_on_feature(const ColMatrix& x, const TreeProblem& problem,
                                               std::span<const std::uint32_t> rows,
                                               std::size_t feature, double min_samples_leaf) {
    check_problem(x, problem);
    if (feature >= x.p) throw std::invalid_argument("tree: feature index out of range");

    Grower gw(x, problem.criterion, problem.lambda,
              problem.criterion == SplitCriterion::Gini ? problem.n_classes : 1);
    gw.min_leaf = min_samples_leaf;

    const std::size_t n = x.n;
    gw.wc.resize(n);
    for (std::size_t r = 0; r < n; ++r)
        gw.wc[r] = problem.weight.empty() ? 1.0 : problem.weight[r];
    switch (problem.criterion) {
        case SplitCriterion::Gini:
            gw.label.assign(problem.labels.begin(), problem.labels.end());
            break;
        case SplitCriterion::Variance:
            gw.g.resize(n);
            gw.h.resize(n);
            for (std::size_t r = 0; r < n; ++r) {
                gw.g[r] = -gw.wc[r] * problem.target[r];
                gw.h[r] = gw.wc[r];
            }
            gw.lambda = 0.0;
            break;
        case SplitCriterion::SecondOrder:
            gw.g.resize(n);
            gw.h.resize(n);
            for (std::size_t r = 0; r < n; ++r) {
                gw.g[r] = gw.wc[r] * problem.grad[r];
                gw.h[r] = gw.wc[r] * problem.hess[r];
            }
            break;
    }

    gw.allowed = {static_cast<std::uint32_t>(feature)};
    gw.n_act = rows.size();
    gw.arena.assign(rows.begin(), rows.end());
    const double* xv = x.v.data() + feature * x.n;
    std::sort(gw.arena.begin(), gw.arena.end(), [xv](std::uint32_t a, std::uint32_t b) {
        return xv[a] < xv[b] || (xv[a] == xv[b] && a < b);
    });

    const Grower::NodeStats parent = gw.stats_of(gw.segment(0, 0, gw.n_act));
    const double parent_score = parent.score(gw.crit, gw.lambda);
    double best_gain = kGainEps * std::max(1.0, std::fabs(parent_score));
    std::int64_t best_slot = -1;
    double best_thr = 0.0;
    gw.scan(0, 0, gw.n_act, parent, parent_score, best_gain, best_slot, best_thr);
    if (best_slot < 0) return std::nullopt;
    return SplitEval{best_thr, best_gain};
}

}  // namespace fadbio
