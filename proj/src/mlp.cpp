#include "metadisc/errors.hpp"
#include "metadisc/evaluate.hpp"
#include "metadisc/models.hpp"
#include "metadisc/rng.hpp"

#include <algorithm>
#include <cmath>

namespace metadisc {

namespace {

constexpr double kProbEps = 1e-7;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Per-sample state: pre-activations and activations per layer.
struct ForwardPass {
    std::vector<std::vector<double>> z; // one per non-input layer
    std::vector<std::vector<double>> a; // activations, same shape as z
};

void forwardSparse(const Mlp& mlp, std::span<const uint32_t> cols, std::span<const double> vals,
                   ForwardPass& pass) {
    const auto& dims = mlp.dims();
    const size_t layers = dims.size() - 1;
    pass.z.resize(layers);
    pass.a.resize(layers);

    for (size_t k = 0; k < layers; ++k) {
        const size_t out = dims[k + 1];
        auto& z = pass.z[k];
        z.assign(mlp.biases()[k].begin(), mlp.biases()[k].end());
        const auto& W = mlp.weights()[k];
        if (k == 0) {
            for (size_t i = 0; i < cols.size(); ++i) {
                const double v = vals[i];
                const double* wRow = W.data() + static_cast<size_t>(cols[i]) * out;
                for (size_t j = 0; j < out; ++j) z[j] += v * wRow[j];
            }
        } else {
            const auto& prev = pass.a[k - 1];
            for (size_t i = 0; i < prev.size(); ++i) {
                const double v = prev[i];
                if (v == 0.0) continue; // rectifier output is often sparse
                const double* wRow = W.data() + i * out;
                for (size_t j = 0; j < out; ++j) z[j] += v * wRow[j];
            }
        }
        auto& a = pass.a[k];
        a.resize(out);
        if (k + 1 == layers) {
            for (size_t j = 0; j < out; ++j) a[j] = sigmoid(z[j]);
        } else {
            for (size_t j = 0; j < out; ++j) a[j] = z[j] > 0.0 ? z[j] : 0.0;
        }
    }
}

} // namespace

double weightedBceLoss(std::span<const double> p, std::span<const uint8_t> y,
                       const LabelWeights& w) {
    if (p.size() != y.size() || p.size() != w.size()) {
        throw ShapeMismatch("probability, label and weight lengths differ");
    }
    double loss = 0.0;
    for (size_t l = 0; l < p.size(); ++l) {
        const double pl = std::clamp(p[l], kProbEps, 1.0 - kProbEps);
        if (y[l]) loss -= w[l] * std::log(pl);
        else loss -= std::log(1.0 - pl);
    }
    return loss;
}

void adamStep(std::span<double> params, std::span<const double> grads, AdamState& state,
              uint64_t t, double lr, double beta1, double beta2, double eps) {
    if (params.size() != grads.size()) throw ShapeMismatch("params and grads differ in size");
    if (state.m.size() != params.size()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    const double mCorr = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double vCorr = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (size_t i = 0; i < params.size(); ++i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grads[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grads[i] * grads[i];
        const double mHat = state.m[i] / mCorr;
        const double vHat = state.v[i] / vCorr;
        params[i] -= lr * mHat / (std::sqrt(vHat) + eps);
    }
}

Mlp Mlp::init(const std::vector<uint32_t>& dims, uint64_t seed) {
    if (dims.size() < 2) throw ConfigError("MLP needs at least input and output layers");
    Mlp mlp;
    mlp.dims_ = dims;
    mlp.weights_.resize(dims.size() - 1);
    mlp.biases_.resize(dims.size() - 1);
    for (size_t k = 0; k + 1 < dims.size(); ++k) {
        const size_t fanIn = dims[k];
        const size_t fanOut = dims[k + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fanIn));
        Rng rng = Rng::derive(seed, k);
        mlp.weights_[k].resize(fanIn * fanOut);
        for (double& v : mlp.weights_[k]) v = rng.uniform(-bound, bound);
        mlp.biases_[k].assign(fanOut, 0.0);
    }
    return mlp;
}

std::vector<double> Mlp::predictProbaRow(std::span<const uint32_t> cols,
                                         std::span<const double> vals) const {
    ForwardPass pass;
    forwardSparse(*this, cols, vals, pass);
    return pass.a.back();
}

Mlp::Gradients Mlp::lossAndGradients(const CsrMatrix& X, const LabelMatrix& Y,
                                     const std::vector<size_t>& rows,
                                     const LabelWeights& w) const {
    if (X.rows() != Y.rows) throw ShapeMismatch("feature and label row counts differ");
    if (X.cols() != dims_.front() || Y.cols != dims_.back()) {
        throw DimensionMismatch("matrix does not match model dimensions");
    }
    if (rows.empty()) throw ShapeMismatch("gradient batch is empty");

    Gradients grads;
    grads.weights.resize(weights_.size());
    grads.biases.resize(biases_.size());
    for (size_t k = 0; k < weights_.size(); ++k) {
        grads.weights[k].assign(weights_[k].size(), 0.0);
        grads.biases[k].assign(biases_[k].size(), 0.0);
    }

    const size_t layers = dims_.size() - 1;
    const size_t labels = dims_.back();
    ForwardPass pass;
    std::vector<std::vector<double>> delta(layers);
    std::vector<uint8_t> yRow(labels);

    for (size_t row : rows) {
        const auto cols = X.rowIndices(row);
        const auto vals = X.rowValues(row);
        forwardSparse(*this, cols, vals, pass);

        for (size_t l = 0; l < labels; ++l) yRow[l] = Y.at(row, l);
        grads.loss += weightedBceLoss(pass.a.back(), yRow, w);

        // d(loss)/dz at the sigmoid output: (1-y)p - w*y*(1-p)
        auto& dOut = delta[layers - 1];
        dOut.resize(labels);
        for (size_t l = 0; l < labels; ++l) {
            const double p = pass.a.back()[l];
            dOut[l] = yRow[l] ? -w[l] * (1.0 - p) : p;
        }

        for (size_t k = layers; k-- > 0;) {
            const size_t out = dims_[k + 1];
            const auto& d = delta[k];
            for (size_t j = 0; j < out; ++j) grads.biases[k][j] += d[j];

            if (k == 0) {
                for (size_t i = 0; i < cols.size(); ++i) {
                    const double v = vals[i];
                    double* gRow = grads.weights[0].data() + static_cast<size_t>(cols[i]) * out;
                    for (size_t j = 0; j < out; ++j) gRow[j] += v * d[j];
                }
            } else {
                const auto& prev = pass.a[k - 1];
                double* gW = grads.weights[k].data();
                for (size_t i = 0; i < prev.size(); ++i) {
                    const double v = prev[i];
                    if (v != 0.0) {
                        double* gRow = gW + i * out;
                        for (size_t j = 0; j < out; ++j) gRow[j] += v * d[j];
                    }
                }
                // propagate to the previous (rectifier) layer
                auto& dPrev = delta[k - 1];
                dPrev.assign(prev.size(), 0.0);
                const auto& W = weights_[k];
                for (size_t i = 0; i < prev.size(); ++i) {
                    if (pass.z[k - 1][i] <= 0.0) continue;
                    const double* wRow = W.data() + i * out;
                    double sum = 0.0;
                    for (size_t j = 0; j < out; ++j) sum += wRow[j] * d[j];
                    dPrev[i] = sum;
                }
            }
        }
    }

    const double inv = 1.0 / static_cast<double>(rows.size());
    grads.loss *= inv;
    for (auto& g : grads.weights) {
        for (double& v : g) v *= inv;
    }
    for (auto& g : grads.biases) {
        for (double& v : g) v *= inv;
    }
    return grads;
}

Mlp trainMlp(const CsrMatrix& X, const LabelMatrix& Y, const CsrMatrix& Xval,
             const LabelMatrix& Yval, const LabelWeights& w, const TrainConfig& cfg,
             MlpTrainReport* report) {
    if (X.rows() != Y.rows) throw ShapeMismatch("feature and label row counts differ");
    if (cfg.batchSize == 0) throw ConfigError("batch_size must be >= 1");

    std::vector<uint32_t> dims;
    dims.push_back(static_cast<uint32_t>(X.cols()));
    for (uint32_t h : cfg.hidden) dims.push_back(h);
    dims.push_back(static_cast<uint32_t>(Y.cols));

    Mlp mlp = Mlp::init(dims, cfg.seed);
    const size_t layers = dims.size() - 1;
    std::vector<AdamState> wState(layers), bState(layers);
    uint64_t step = 0;

    const bool haveValidation = Xval.rows() > 0;
    Mlp bestSnapshot = mlp;
    double bestScore = -1.0;
    uint32_t bestEpoch = 0;
    uint32_t stale = 0;

    std::vector<size_t> order(X.rows());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    MlpTrainReport localReport;
    MlpTrainReport& rep = report ? *report : localReport;

    for (uint32_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng shuffleRng = Rng::derive(cfg.seed, 0x10000u + epoch);
        shuffleRng.shuffle(order);

        double epochLoss = 0.0;
        size_t batches = 0;
        for (size_t start = 0; start < order.size(); start += cfg.batchSize) {
            const size_t stop = std::min(order.size(), start + cfg.batchSize);
            const std::vector<size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                            order.begin() + static_cast<std::ptrdiff_t>(stop));
            auto grads = mlp.lossAndGradients(X, Y, batch, w);
            if (!std::isfinite(grads.loss)) {
                throw NonFiniteLoss("training diverged at epoch " + std::to_string(epoch) +
                                    ", loss=" + std::to_string(grads.loss));
            }
            epochLoss += grads.loss;
            ++batches;
            ++step;
            for (size_t k = 0; k < layers; ++k) {
                adamStep(mlp.weights()[k], grads.weights[k], wState[k], step, cfg.learningRate);
                adamStep(mlp.biases()[k], grads.biases[k], bState[k], step, cfg.learningRate);
            }
        }
        rep.epochLoss.push_back(batches ? epochLoss / static_cast<double>(batches) : 0.0);
        rep.epochsRun = epoch;

        if (haveValidation) {
            const LabelMatrix pred = mlp.predict(Xval, cfg.threshold);
            const ConfusionCounts counts = confusion(Yval, pred);
            const double score = macroScores(counts, 1.0).macro;
            if (score > bestScore + 1e-12) {
                bestScore = score;
                bestSnapshot = mlp;
                bestEpoch = epoch;
                stale = 0;
            } else if (++stale >= cfg.patience) {
                break;
            }
        }
    }

    if (haveValidation) {
        rep.bestEpoch = bestEpoch;
        rep.bestValidationScore = bestScore;
        return bestSnapshot;
    }
    rep.bestEpoch = rep.epochsRun;
    return mlp;
}

} // namespace metadisc
