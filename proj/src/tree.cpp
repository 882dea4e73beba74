#include "metadisc/errors.hpp"
#include "metadisc/models.hpp"
#include "metadisc/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace metadisc {

namespace {
constexpr double kMinImprovement = 1e-12;
} // namespace

/// Shared, immutable view of one training problem. Labels are packed into
/// per-row bitmasks (at most 32 labels).
struct TreeProblem {
    const CsrMatrix& X;
    std::vector<uint32_t> yBits;
    std::vector<double> weights;
    size_t labels;

    TreeProblem(const CsrMatrix& x, const LabelMatrix& y, const LabelWeights& w)
        : X(x), labels(y.cols) {
        if (x.rows() != y.rows) throw ShapeMismatch("feature and label row counts differ");
        if (y.cols == 0 || y.cols > 32) throw ShapeMismatch("label count must be in 1..32");
        if (w.size() != y.cols) throw ShapeMismatch("label weights not aligned with labels");
        weights = w.weights;
        yBits.resize(y.rows, 0);
        for (size_t r = 0; r < y.rows; ++r) {
            uint32_t bits = 0;
            for (size_t l = 0; l < y.cols; ++l) {
                if (y.at(r, l)) bits |= (1u << l);
            }
            yBits[r] = bits;
        }
    }
};

struct GatherEntry {
    uint32_t col = 0;
    double value = 0.0;
    uint32_t mult = 0;
    uint32_t yBits = 0;
};

class TreeBuilder {
public:
    TreeBuilder(const TreeProblem& problem, const TrainConfig& cfg, bool randomThresholds,
                Rng rng)
        : p_(problem),
          cfg_(cfg),
          randomThresholds_(randomThresholds),
          rng_(rng),
          nodeMult_(problem.X.rows(), 0),
          candidateMask_(problem.X.cols(), 0),
          featurePool_(problem.X.cols()) {
        for (uint32_t f = 0; f < featurePool_.size(); ++f) featurePool_[f] = f;
        featuresPerSplit_ = cfg.featuresPerSplit;
        if (featuresPerSplit_ == 0) {
            featuresPerSplit_ = std::max<uint32_t>(
                1, static_cast<uint32_t>(std::floor(std::sqrt(static_cast<double>(p_.X.cols())))));
        }
        featuresPerSplit_ = std::min<uint32_t>(featuresPerSplit_,
                                               static_cast<uint32_t>(p_.X.cols()));
    }

    DecisionTree build(std::vector<uint32_t> sampleRows) {
        DecisionTree tree;
        tree.inputDim_ = p_.X.cols();
        tree.labels_ = p_.labels;
        nodes_ = &tree.nodes_;
        buildNode(std::move(sampleRows), 0);
        nodes_ = nullptr;
        return tree;
    }

private:
    const TreeProblem& p_;
    const TrainConfig& cfg_;
    bool randomThresholds_;
    Rng rng_;
    uint32_t featuresPerSplit_ = 0;

    std::vector<TreeNode>* nodes_ = nullptr;
    std::vector<uint32_t> nodeMult_;      // per-row multiplicity within the current node
    std::vector<uint8_t> candidateMask_;  // per-feature flag for the current node
    std::vector<uint32_t> featurePool_;   // permutation buffer for feature sampling
    std::vector<GatherEntry> gather_;

    struct BestSplit {
        bool valid = false;
        uint32_t feature = 0;
        double threshold = 0.0;
        double impurity = std::numeric_limits<double>::infinity();
    };

    /// Per-label Gini of one side: p = weighted positive mass / total mass.
    static double giniTerm(double posMass, double negMass) {
        const double total = posMass + negMass;
        if (total <= 0.0) return 0.0;
        const double p = posMass / total;
        const double q = negMass / total;
        return 1.0 - p * p - q * q;
    }

    double nodeImpurity(const std::vector<uint64_t>& pos, uint64_t count) const {
        double sum = 0.0;
        for (size_t l = 0; l < p_.labels; ++l) {
            const double posMass = static_cast<double>(pos[l]) * p_.weights[l];
            const double negMass = static_cast<double>(count - pos[l]);
            sum += giniTerm(posMass, negMass);
        }
        return sum / static_cast<double>(p_.labels);
    }

    /// Weighted-average impurity of the two children induced by a split.
    double splitImpurity(const std::vector<uint64_t>& leftPos, uint64_t leftCount,
                         const std::vector<uint64_t>& nodePos, uint64_t nodeCount) const {
        double sum = 0.0;
        for (size_t l = 0; l < p_.labels; ++l) {
            const double w = p_.weights[l];
            const double lp = static_cast<double>(leftPos[l]) * w;
            const double ln = static_cast<double>(leftCount - leftPos[l]);
            const double rp = static_cast<double>(nodePos[l] - leftPos[l]) * w;
            const double rn = static_cast<double>((nodeCount - leftCount) - (nodePos[l] - leftPos[l]));
            const double wl = lp + ln;
            const double wr = rp + rn;
            const double total = wl + wr;
            if (total <= 0.0) continue;
            sum += (wl * giniTerm(lp, ln) + wr * giniTerm(rp, rn)) / total;
        }
        return sum / static_cast<double>(p_.labels);
    }

    uint32_t makeLeaf(const std::vector<uint64_t>& pos, uint64_t count) {
        TreeNode node;
        node.leaf = true;
        node.sampleCount = static_cast<double>(count);
        node.positiveFraction.resize(p_.labels);
        for (size_t l = 0; l < p_.labels; ++l) {
            const double posMass = static_cast<double>(pos[l]) * p_.weights[l];
            const double negMass = static_cast<double>(count - pos[l]);
            const double total = posMass + negMass;
            node.positiveFraction[l] = total > 0.0 ? posMass / total : 0.0;
        }
        nodes_->push_back(std::move(node));
        return static_cast<uint32_t>(nodes_->size() - 1);
    }

    std::span<const uint32_t> sampleFeatures() {
        const uint32_t total = static_cast<uint32_t>(featurePool_.size());
        if (featuresPerSplit_ >= total) {
            // Full feature set: keep the natural 0..F-1 order (and consume no
            // randomness), so a degenerate one-tree forest reproduces the
            // plain decision tree exactly.
            for (uint32_t f = 0; f < total; ++f) featurePool_[f] = f;
            return {featurePool_.data(), total};
        }
        for (uint32_t i = 0; i < featuresPerSplit_; ++i) {
            const uint32_t j = i + static_cast<uint32_t>(rng_.nextBelow(total - i));
            std::swap(featurePool_[i], featurePool_[j]);
        }
        return {featurePool_.data(), featuresPerSplit_};
    }

    BestSplit findBestSplit(const std::vector<uint32_t>& rows,
                            const std::vector<uint64_t>& nodePos, uint64_t nodeCount,
                            double nodeImp) {
        const auto candidates = sampleFeatures();
        for (uint32_t f : candidates) candidateMask_[f] = 1;

        // Gather the node's nonzero cells for candidate features, row by row.
        gather_.clear();
        std::vector<uint32_t> uniqueRows;
        uniqueRows.reserve(rows.size());
        for (uint32_t row : rows) {
            if (nodeMult_[row]++ == 0) uniqueRows.push_back(row);
        }
        for (uint32_t row : uniqueRows) {
            const auto cols = p_.X.rowIndices(row);
            const auto vals = p_.X.rowValues(row);
            for (size_t k = 0; k < cols.size(); ++k) {
                if (!candidateMask_[cols[k]]) continue;
                gather_.push_back({cols[k], vals[k], nodeMult_[row], p_.yBits[row]});
            }
        }
        std::sort(gather_.begin(), gather_.end(), [](const GatherEntry& a, const GatherEntry& b) {
            if (a.col != b.col) return a.col < b.col;
            return a.value < b.value;
        });

        BestSplit best;
        std::vector<uint64_t> slicePos(p_.labels);
        std::vector<uint64_t> leftPos(p_.labels);

        size_t begin = 0;
        // Features with no nonzero cell in this node are constant (all zero)
        // here and cannot split; they are skipped implicitly.
        while (begin < gather_.size()) {
            size_t end = begin;
            const uint32_t col = gather_[begin].col;
            uint64_t nnzCount = 0;
            std::fill(slicePos.begin(), slicePos.end(), 0);
            while (end < gather_.size() && gather_[end].col == col) {
                const auto& e = gather_[end];
                nnzCount += e.mult;
                for (size_t l = 0; l < p_.labels; ++l) {
                    if (e.yBits & (1u << l)) slicePos[l] += e.mult;
                }
                ++end;
            }
            const uint64_t zeroCount = nodeCount - nnzCount;
            if (randomThresholds_) {
                scanRandomThreshold(col, begin, end, zeroCount, nodePos, slicePos, nodeCount,
                                    leftPos, best, nodeImp);
            } else {
                scanAllThresholds(col, begin, end, zeroCount, nodePos, slicePos, nodeCount,
                                  leftPos, best, nodeImp);
            }
            begin = end;
        }

        for (uint32_t f : candidates) candidateMask_[f] = 0;
        for (uint32_t row : uniqueRows) nodeMult_[row] = 0;
        return best;
    }

    void considerThreshold(uint32_t col, double threshold, const std::vector<uint64_t>& leftPos,
                           uint64_t leftCount, const std::vector<uint64_t>& nodePos,
                           uint64_t nodeCount, BestSplit& best, double nodeImp) {
        const uint64_t rightCount = nodeCount - leftCount;
        if (leftCount < cfg_.minSamplesLeaf || rightCount < cfg_.minSamplesLeaf) return;
        if (leftCount == 0 || rightCount == 0) return;
        const double impurity = splitImpurity(leftPos, leftCount, nodePos, nodeCount);
        if (impurity >= nodeImp - kMinImprovement) return;
        if (impurity < best.impurity) {
            best.valid = true;
            best.feature = col;
            best.threshold = threshold;
            best.impurity = impurity;
        }
    }

    /// Best-threshold scan: walk the value groups in ascending order, placing
    /// the zero block at its sorted position; thresholds are midpoints of
    /// consecutive distinct values.
    void scanAllThresholds(uint32_t col, size_t begin, size_t end, uint64_t zeroCount,
                           const std::vector<uint64_t>& nodePos,
                           const std::vector<uint64_t>& slicePos, uint64_t nodeCount,
                           std::vector<uint64_t>& leftPos, BestSplit& best, double nodeImp) {
        std::fill(leftPos.begin(), leftPos.end(), 0);
        uint64_t leftCount = 0;
        bool zeroPending = zeroCount > 0;
        double prevValue = 0.0;
        bool havePrev = false;

        const auto emitGroup = [&](double value, uint64_t count, const uint64_t* pos) {
            if (havePrev && value > prevValue) {
                considerThreshold(col, prevValue + 0.5 * (value - prevValue), leftPos, leftCount,
                                  nodePos, nodeCount, best, nodeImp);
            }
            for (size_t l = 0; l < p_.labels; ++l) leftPos[l] += pos ? pos[l] : 0;
            leftCount += count;
            prevValue = value;
            havePrev = true;
        };

        std::vector<uint64_t> zeroPos(p_.labels);
        for (size_t l = 0; l < p_.labels; ++l) zeroPos[l] = nodePos[l] - slicePos[l];

        size_t i = begin;
        std::vector<uint64_t> groupPos(p_.labels);
        while (i < end || zeroPending) {
            if (zeroPending && (i >= end || 0.0 < gather_[i].value)) {
                emitGroup(0.0, zeroCount, zeroPos.data());
                zeroPending = false;
                continue;
            }
            const double value = gather_[i].value;
            std::fill(groupPos.begin(), groupPos.end(), 0);
            uint64_t count = 0;
            while (i < end && gather_[i].value == value) {
                const auto& e = gather_[i];
                count += e.mult;
                for (size_t l = 0; l < p_.labels; ++l) {
                    if (e.yBits & (1u << l)) groupPos[l] += e.mult;
                }
                ++i;
            }
            emitGroup(value, count, groupPos.data());
        }
    }

    /// Extra-trees scan: one uniformly random threshold between the observed
    /// min and max of this feature within the node.
    void scanRandomThreshold(uint32_t col, size_t begin, size_t end, uint64_t zeroCount,
                             const std::vector<uint64_t>& nodePos,
                             const std::vector<uint64_t>& slicePos, uint64_t nodeCount,
                             std::vector<uint64_t>& leftPos, BestSplit& best, double nodeImp) {
        double minValue = gather_[begin].value;
        double maxValue = gather_[end - 1].value;
        if (zeroCount > 0) {
            minValue = std::min(minValue, 0.0);
            maxValue = std::max(maxValue, 0.0);
        }
        if (!(maxValue > minValue)) return; // constant within the node
        const double threshold = rng_.uniform(minValue, maxValue);

        std::fill(leftPos.begin(), leftPos.end(), 0);
        uint64_t leftCount = 0;
        for (size_t i = begin; i < end; ++i) {
            const auto& e = gather_[i];
            if (e.value <= threshold) {
                leftCount += e.mult;
                for (size_t l = 0; l < p_.labels; ++l) {
                    if (e.yBits & (1u << l)) leftPos[l] += e.mult;
                }
            }
        }
        if (zeroCount > 0 && 0.0 <= threshold) {
            leftCount += zeroCount;
            for (size_t l = 0; l < p_.labels; ++l) leftPos[l] += nodePos[l] - slicePos[l];
        }
        considerThreshold(col, threshold, leftPos, leftCount, nodePos, nodeCount, best, nodeImp);
    }

    uint32_t buildNode(std::vector<uint32_t> rows, uint32_t depth) {
        const uint64_t nodeCount = rows.size();
        std::vector<uint64_t> nodePos(p_.labels, 0);
        for (uint32_t row : rows) {
            const uint32_t bits = p_.yBits[row];
            for (size_t l = 0; l < p_.labels; ++l) {
                if (bits & (1u << l)) ++nodePos[l];
            }
        }

        bool pure = true;
        for (size_t l = 0; l < p_.labels && pure; ++l) {
            pure = nodePos[l] == 0 || nodePos[l] == nodeCount;
        }
        const bool depthCapped = cfg_.maxDepth > 0 && depth >= cfg_.maxDepth;
        if (pure || depthCapped || nodeCount < cfg_.minSamplesSplit || nodeCount < 2) {
            return makeLeaf(nodePos, nodeCount);
        }

        const double nodeImp = nodeImpurity(nodePos, nodeCount);
        const BestSplit best = findBestSplit(rows, nodePos, nodeCount, nodeImp);
        if (!best.valid) return makeLeaf(nodePos, nodeCount);

        std::vector<uint32_t> leftRows, rightRows;
        leftRows.reserve(rows.size());
        rightRows.reserve(rows.size());
        for (uint32_t row : rows) {
            (p_.X.at(row, best.feature) <= best.threshold ? leftRows : rightRows).push_back(row);
        }
        rows.clear();
        rows.shrink_to_fit();

        nodes_->emplace_back();
        const uint32_t index = static_cast<uint32_t>(nodes_->size() - 1);
        (*nodes_)[index].leaf = false;
        (*nodes_)[index].feature = best.feature;
        (*nodes_)[index].threshold = best.threshold;
        (*nodes_)[index].sampleCount = static_cast<double>(nodeCount);

        const uint32_t left = buildNode(std::move(leftRows), depth + 1);
        (*nodes_)[index].left = left;
        const uint32_t right = buildNode(std::move(rightRows), depth + 1);
        (*nodes_)[index].right = right;
        return index;
    }
};

namespace {
std::vector<uint32_t> allRows(size_t n) {
    std::vector<uint32_t> rows(n);
    for (size_t i = 0; i < n; ++i) rows[i] = static_cast<uint32_t>(i);
    return rows;
}
} // namespace

std::vector<double> DecisionTree::predictProbaRow(std::span<const uint32_t> cols,
                                                  std::span<const double> vals) const {
    const TreeNode* node = &nodes_.front();
    while (!node->leaf) {
        double value = 0.0;
        const auto it = std::lower_bound(cols.begin(), cols.end(), node->feature);
        if (it != cols.end() && *it == node->feature) {
            value = vals[static_cast<size_t>(it - cols.begin())];
        }
        node = &nodes_[value <= node->threshold ? node->left : node->right];
    }
    return node->positiveFraction;
}

uint32_t DecisionTree::depth() const {
    // Iterative depth over the flattened representation.
    if (nodes_.empty()) return 0;
    std::vector<std::pair<uint32_t, uint32_t>> stack = {{0, 1}};
    uint32_t maxDepth = 0;
    while (!stack.empty()) {
        const auto [idx, d] = stack.back();
        stack.pop_back();
        maxDepth = std::max(maxDepth, d);
        const TreeNode& node = nodes_[idx];
        if (!node.leaf) {
            stack.push_back({node.left, d + 1});
            stack.push_back({node.right, d + 1});
        }
    }
    return maxDepth;
}

std::vector<double> Forest::predictProbaRow(std::span<const uint32_t> cols,
                                            std::span<const double> vals) const {
    std::vector<double> sum(labelCount(), 0.0);
    for (const auto& tree : trees_) {
        const auto proba = tree.predictProbaRow(cols, vals);
        for (size_t l = 0; l < sum.size(); ++l) sum[l] += proba[l];
    }
    const double inv = 1.0 / static_cast<double>(trees_.size());
    for (double& v : sum) v *= inv;
    return sum;
}

DecisionTree trainDecisionTree(const CsrMatrix& X, const LabelMatrix& Y, const LabelWeights& w,
                               const TrainConfig& cfg) {
    const TreeProblem problem(X, Y, w);
    TrainConfig treeCfg = cfg;
    treeCfg.featuresPerSplit = static_cast<uint32_t>(X.cols()); // all features
    TreeBuilder builder(problem, treeCfg, /*randomThresholds=*/false, Rng(cfg.seed));
    return builder.build(allRows(X.rows()));
}

Forest trainForest(const CsrMatrix& X, const LabelMatrix& Y, const LabelWeights& w,
                   const TrainConfig& cfg, ModelFamily family) {
    if (family != ModelFamily::RandomForest && family != ModelFamily::ExtraTrees) {
        throw ConfigError("trainForest expects a forest family");
    }
    if (cfg.nTrees < 1) throw ConfigError("n_trees must be >= 1");

    const TreeProblem problem(X, Y, w);
    const bool extra = family == ModelFamily::ExtraTrees;
    const bool bootstrap = extra ? false : cfg.bootstrap;

    Forest forest;
    forest.family_ = family;
    forest.trees_.resize(cfg.nTrees);

    const auto trainOne = [&](uint32_t t) {
        Rng rng = Rng::derive(cfg.seed, t);
        std::vector<uint32_t> rows;
        if (bootstrap) {
            rows.resize(X.rows());
            for (auto& r : rows) r = static_cast<uint32_t>(rng.nextBelow(X.rows()));
        } else {
            rows = allRows(X.rows());
        }
        TreeBuilder builder(problem, cfg, extra, rng);
        forest.trees_[t] = builder.build(std::move(rows));
    };

    uint32_t threads = cfg.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, cfg.nTrees);

    if (threads <= 1) {
        for (uint32_t t = 0; t < cfg.nTrees; ++t) trainOne(t);
    } else {
        std::vector<std::thread> pool;
        std::atomic<uint32_t> next{0};
        for (uint32_t w = 0; w < threads; ++w) {
            pool.emplace_back([&]() {
                for (;;) {
                    const uint32_t t = next.fetch_add(1);
                    if (t >= cfg.nTrees) return;
                    trainOne(t);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return forest;
}

} // namespace metadisc
