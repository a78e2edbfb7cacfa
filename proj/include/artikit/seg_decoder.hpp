#pragma once

#include <Eigen/Core>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "artikit/errors.hpp"
#include "artikit/pointcloud.hpp"

namespace artikit {

// Weights of the segmentation head. The query projection consumes the fused
// token [h_category ; h_seg] (dimension 2h), the key projection consumes
// per-point features (dimension p); both map into the shared attention
// dimension d.
struct SegDecoderParams {
    Eigen::MatrixXd w_query;  // d x 2h
    Eigen::MatrixXd w_key;    // d x p
    double threshold = 0.5;

    Eigen::Index attention_dim() const { return w_query.rows(); }
};

// Final hidden state of one segmentation-marker token plus the state of the
// category token preceding it.
struct SegTokenPair {
    Eigen::VectorXd h_seg;
    Eigen::VectorXd h_category;
};

// M x p per-point features from the 3D backbone, ingested as a fixture.
struct PointFeatures {
    Eigen::MatrixXd features;
    Eigen::Index point_count() const { return features.rows(); }
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Per-point membership probabilities: q = W_query [h_category ; h_seg],
// k_i = W_key f_i, probability_i = sigmoid(q . k_i / sqrt(d)).
inline Eigen::VectorXd score_points(const SegDecoderParams& params, const SegTokenPair& pair,
                                    const PointFeatures& feats) {
    if (!(params.threshold > 0.0 && params.threshold < 1.0))
        throw DimensionMismatchError("threshold must lie in (0, 1)");
    if (pair.h_seg.size() != pair.h_category.size())
        throw DimensionMismatchError("h_seg and h_category dimensions differ");
    if (params.w_query.cols() != pair.h_seg.size() + pair.h_category.size())
        throw DimensionMismatchError("w_query expects " + std::to_string(params.w_query.cols()) +
                                     " inputs, fused token has " +
                                     std::to_string(pair.h_seg.size() + pair.h_category.size()));
    if (params.w_key.cols() != feats.features.cols())
        throw DimensionMismatchError("w_key expects " + std::to_string(params.w_key.cols()) +
                                     " feature dims, got " + std::to_string(feats.features.cols()));
    if (params.w_key.rows() != params.w_query.rows())
        throw DimensionMismatchError("w_query and w_key attention dimensions differ");

    Eigen::VectorXd fused(pair.h_category.size() + pair.h_seg.size());
    fused << pair.h_category, pair.h_seg;
    const Eigen::VectorXd query = params.w_query * fused;
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(params.attention_dim()));
    const Eigen::VectorXd logits = (feats.features * params.w_key.transpose()) * query * inv_sqrt_d;
    return logits.unaryExpr([](double z) { return sigmoid(z); });
}

// index i joins the mask iff probability_i >= tau
inline PartMask binarize(const Eigen::VectorXd& probabilities, double tau = 0.5,
                         const std::string& part_name = "part") {
    if (!(tau > 0.0 && tau < 1.0)) throw DimensionMismatchError("tau must lie in (0, 1)");
    std::vector<int> indices;
    for (Eigen::Index i = 0; i < probabilities.size(); ++i)
        if (probabilities[i] >= tau) indices.push_back(static_cast<int>(i));
    return {part_name, std::move(indices)};
}

struct SegLossResult {
    double loss = 0.0;
    double bce = 0.0;
    double dice = 0.0;
    Eigen::VectorXd grad_logits;
};

// BCE + Dice with smoothing s = 1 and the analytic gradient with respect to
// the pre-sigmoid logits. Probabilities are clamped to [1e-7, 1 - 1e-7] to
// keep the logs finite; the gradient is zero where the clamp is active.
inline SegLossResult seg_loss(const Eigen::VectorXd& probabilities, const PartMask& gt,
                              double lambda_bce = 1.0, double lambda_dice = 1.0) {
    const Eigen::Index m = probabilities.size();
    if (m == 0) throw DimensionMismatchError("seg_loss over zero points");
    if (!gt.member_indices.empty() && gt.member_indices.back() >= m)
        throw DimensionMismatchError("ground-truth mask index " +
                                     std::to_string(gt.member_indices.back()) + " >= " +
                                     std::to_string(m));
    constexpr double kClamp = 1e-7;
    constexpr double kSmooth = 1.0;

    Eigen::VectorXd target = Eigen::VectorXd::Zero(m);
    for (int idx : gt.member_indices) target[idx] = 1.0;

    Eigen::VectorXd p(m);
    Eigen::VectorXd clamp_active(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double raw = probabilities[i];
        const double clamped = std::min(std::max(raw, kClamp), 1.0 - kClamp);
        p[i] = clamped;
        clamp_active[i] = clamped == raw ? 0.0 : 1.0;
    }

    SegLossResult result;
    const double inv_m = 1.0 / static_cast<double>(m);
    double bce = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
        bce -= target[i] * std::log(p[i]) + (1.0 - target[i]) * std::log(1.0 - p[i]);
    result.bce = bce * inv_m;

    const double intersection = p.dot(target);
    const double denom = p.sum() + target.sum() + kSmooth;
    result.dice = 1.0 - (2.0 * intersection + kSmooth) / denom;

    result.loss = lambda_bce * result.bce + lambda_dice * result.dice;

    result.grad_logits.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (clamp_active[i] != 0.0) {
            result.grad_logits[i] = 0.0;  // flat through the clamp
            continue;
        }
        const double dsig = p[i] * (1.0 - p[i]);
        const double dbce_dp = (-target[i] / p[i] + (1.0 - target[i]) / (1.0 - p[i])) * inv_m;
        const double ddice_dp = -(2.0 * target[i] * denom - (2.0 * intersection + kSmooth)) / (denom * denom);
        result.grad_logits[i] = (lambda_bce * dbce_dp + lambda_dice * ddice_dp) * dsig;
    }
    return result;
}

// L = lambda_text * text_loss + lambda_seg * sum(seg_losses)
inline double total_loss(double text_loss, const std::vector<double>& seg_losses, double lambda_text,
                         double lambda_seg) {
    double seg_sum = 0.0;
    for (double l : seg_losses) seg_sum += l;
    return lambda_text * text_loss + lambda_seg * seg_sum;
}

// ---------------------------------------------------------------------------
// Tensor container: {"shape": [d0, d1, ...], "data": row-major floats}
// ---------------------------------------------------------------------------

inline void save_tensor(const Eigen::MatrixXd& tensor, const std::filesystem::path& path) {
    nlohmann::ordered_json doc;
    doc["shape"] = {tensor.rows(), tensor.cols()};
    auto& data = doc["data"] = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < tensor.rows(); ++r)
        for (Eigen::Index c = 0; c < tensor.cols(); ++c) data.push_back(tensor(r, c));
    std::ofstream file(path);
    if (!file) throw IoError("cannot write " + path.string());
    file << doc.dump(2) << '\n';
}

inline Eigen::MatrixXd load_tensor(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(file);
    } catch (const nlohmann::json::parse_error& e) {
        throw JsonSyntaxError(path.string() + ": " + e.what());
    }
    if (!doc.contains("shape") || !doc.contains("data"))
        throw SchemaViolationError(path.string() + ": tensor needs \"shape\" and \"data\"");
    const auto& shape = doc["shape"];
    if (!shape.is_array() || shape.empty() || shape.size() > 2)
        throw SchemaViolationError(path.string() + ": shape must have 1 or 2 dimensions");
    const Eigen::Index rows = shape[0].get<Eigen::Index>();
    const Eigen::Index cols = shape.size() == 2 ? shape[1].get<Eigen::Index>() : 1;
    const auto& data = doc["data"];
    if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw SchemaViolationError(path.string() + ": data length does not match shape");
    Eigen::MatrixXd tensor(rows, cols);
    Eigen::Index flat = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) tensor(r, c) = data[flat++].get<double>();
    return tensor;
}

}  // namespace artikit
