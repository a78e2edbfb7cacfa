#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <random>

#include "artikit/metrics.hpp"
#include "artikit/mock_predictor.hpp"
#include "helpers.hpp"

using namespace artikit;

TEST_CASE("segmentation identity and partial overlap", "[metrics]") {
    const std::vector<PartMask> gt{make_mask("a", {0, 1, 2}), make_mask("b", {3, 4})};
    const SegEvalResult same = eval_segmentation(gt, gt, 10);
    REQUIRE(same.miou == 1.0);
    REQUIRE(same.count_match);

    const std::vector<PartMask> half{make_mask("a", {0, 1, 2, 3, 4})};
    std::vector<PartMask> ten{make_mask("g", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9})};
    const SegEvalResult part = eval_segmentation(half, ten, 10);
    REQUIRE(part.miou == 0.5);
}

TEST_CASE("unmatched ground-truth parts score zero", "[metrics]") {
    const std::vector<PartMask> gt{make_mask("a", {0, 1}), make_mask("b", {5, 6})};
    const std::vector<PartMask> pred{make_mask("x", {0, 1})};
    const SegEvalResult result = eval_segmentation(pred, gt, 10);
    REQUIRE(result.miou == 0.5);  // (1.0 + 0) / 2
    REQUIRE_FALSE(result.count_match);
}

TEST_CASE("miou is invariant under prediction relabeling", "[metrics]") {
    std::mt19937 gen(41);
    std::uniform_int_distribution<int> pick(0, 59);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<PartMask> gt, pred;
        for (int m = 0; m < 4; ++m) {
            std::vector<int> gi, pi;
            for (int k = 0; k < 20; ++k) {
                gi.push_back(pick(gen));
                pi.push_back(pick(gen));
            }
            gt.push_back(make_mask("g" + std::to_string(m), std::move(gi)));
            pred.push_back(make_mask("p" + std::to_string(m), std::move(pi)));
        }
        const double baseline = eval_segmentation(pred, gt, 60).miou;
        std::shuffle(pred.begin(), pred.end(), gen);
        REQUIRE(eval_segmentation(pred, gt, 60).miou == Catch::Approx(baseline).margin(1e-12));
    }
}

TEST_CASE("mask indices must be in range", "[metrics]") {
    REQUIRE_THROWS_AS(eval_segmentation({make_mask("a", {11})}, {}, 10), IndexOutOfRangeError);
}

TEST_CASE("axis error basics", "[metrics]") {
    REQUIRE(axis_error({0, 1, 0}, {0, 1, 0}) == 0.0);
    REQUIRE(axis_error({0, 1, 0}, {1, 0, 0}) == Catch::Approx(M_PI / 2));
    // the faucet's two switches: (0,1,0) vs (0,-1,0)
    REQUIRE(axis_error({0, 1, 0}, {0, -1, 0}, false) == Catch::Approx(M_PI));
    REQUIRE(axis_error({0, 1, 0}, {0, -1, 0}, true) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE_THROWS_AS(axis_error({0, 0, 0}, {1, 0, 0}), ZeroAxisError);
}

TEST_CASE("axis error symmetry and scale invariance", "[metrics]") {
    std::mt19937 gen(5150);
    std::normal_distribution<double> normal(0, 1);
    std::uniform_real_distribution<double> scale(0.1, 10);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Vector3d a{normal(gen), normal(gen), normal(gen)};
        const Eigen::Vector3d b{normal(gen), normal(gen), normal(gen)};
        if (a.norm() < 1e-6 || b.norm() < 1e-6) continue;
        const double forward = axis_error(a, b);
        REQUIRE(axis_error(b, a) == forward);
        REQUIRE(axis_error(scale(gen) * a, scale(gen) * b) == Catch::Approx(forward).margin(1e-12));
        REQUIRE(forward >= 0.0);
        REQUIRE(forward <= M_PI);
    }
}

namespace {

UrdfModel random_flat_gt(std::mt19937& gen, int joints) {
    std::uniform_real_distribution<double> coord(-1, 1);
    std::vector<testutil::PartSpec> parts;
    for (int i = 0; i < joints; ++i) {
        testutil::PartSpec p;
        p.name = "part_" + std::to_string(i);
        p.type = i % 3 == 0 ? JointType::Prismatic : JointType::Revolute;
        p.origin.xyz = {coord(gen), coord(gen), coord(gen)};
        p.limit = JointLimit{0, 1};
        Eigen::Vector3d axis{coord(gen), coord(gen), coord(gen)};
        while (axis.norm() < 1e-3) axis = {coord(gen), coord(gen), coord(gen)};
        p.axis = axis.normalized();
        parts.push_back(p);
    }
    return testutil::make_flat_model("gt", parts);
}

}  // namespace

TEST_CASE("identity prediction scores zero on all joint errors", "[metrics]") {
    std::mt19937 gen(7);
    const UrdfModel gt = random_flat_gt(gen, 5);
    const ArticulationPrediction prediction = mock_predict(gt, {}, 1);
    for (auto policy : {MatchPolicy::ById, MatchPolicy::HungarianOrigin}) {
        JointEvalOptions options;
        options.policy = policy;
        const JointErrorAggregate agg = eval_joints(prediction, gt, options);
        REQUIRE(agg.matched == 5);
        REQUIRE(*agg.type_error == 0.0);
        REQUIRE(*agg.axis_error_rad == 0.0);
        REQUIRE(*agg.origin_error_m == 0.0);
    }
}

TEST_CASE("axis tilt delta is recovered exactly under by-id matching", "[metrics]") {
    std::mt19937 gen(19);
    for (double delta : {0.05, 0.132, 0.5, 1.5, 3.0}) {
        const UrdfModel gt = random_flat_gt(gen, 6);
        NoiseSpec noise;
        noise.axis_tilt_rad = delta;
        const ArticulationPrediction prediction = mock_predict(gt, noise, 123);
        JointEvalOptions options;
        options.policy = MatchPolicy::ById;
        const JointErrorAggregate agg = eval_joints(prediction, gt, options);
        REQUIRE(std::fabs(*agg.axis_error_rad - delta) < 1e-9);
        REQUIRE(*agg.type_error == 0.0);
    }
}

TEST_CASE("hungarian-origin matching equals permutation search", "[metrics]") {
    std::mt19937 gen(90210);
    std::uniform_int_distribution<int> size(1, 6);
    std::uniform_real_distribution<double> coord(-1, 1);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = size(gen);
        const UrdfModel gt = random_flat_gt(gen, n);
        ArticulationPrediction prediction = mock_predict(gt, {}, 1);
        for (auto& j : prediction.joints)  // scatter origins so matching is nontrivial
            j.origin.xyz += Eigen::Vector3d{coord(gen), coord(gen), coord(gen)};

        const JointErrorAggregate agg = eval_joints(prediction, gt, {});
        double got = 0.0;
        for (const auto& pair : agg.pairs) got += pair.origin_error_m;

        // brute force over gt permutations
        std::vector<int> perm(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
        double best = std::numeric_limits<double>::infinity();
        do {
            double total = 0.0;
            for (int i = 0; i < n; ++i)
                total += (prediction.joints[static_cast<std::size_t>(i)].origin.xyz -
                          gt.joints[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])].origin.xyz)
                             .norm();
            best = std::min(best, total);
        } while (std::next_permutation(perm.begin(), perm.end()));
        REQUIRE(got == Catch::Approx(best).margin(1e-9));
    }
}

TEST_CASE("origin-cost ties break toward the lowest indices", "[metrics]") {
    // two joints share one origin: every pairing has equal total cost, so the
    // in-order pairing must win (types then agree)
    const UrdfModel gt = testutil::make_flat_model(
        "tie", {{"a", JointType::Revolute, {{0.1, 0.1, 0.1}, {0, 0, 0}}, Eigen::Vector3d::UnitZ(),
                 JointLimit{0, 1}},
                {"b", JointType::Prismatic, {{0.1, 0.1, 0.1}, {0, 0, 0}}, Eigen::Vector3d::UnitX(),
                 JointLimit{0, 1}}});
    const ArticulationPrediction prediction = mock_predict(gt, {}, 1);
    const JointErrorAggregate agg = eval_joints(prediction, gt, {});
    REQUIRE(agg.pairs.size() == 2);
    REQUIRE(agg.pairs[0].pred_id == agg.pairs[0].gt_id);
    REQUIRE(agg.pairs[1].pred_id == agg.pairs[1].gt_id);
    REQUIRE(*agg.type_error == 0.0);
}

TEST_CASE("unmatched joints count as type errors", "[metrics]") {
    std::mt19937 gen(3);
    const UrdfModel gt = random_flat_gt(gen, 4);
    NoiseSpec noise;
    noise.drop_part_prob = 1.0;  // drop all 4 parts
    const ArticulationPrediction empty_pred = mock_predict(gt, noise, 5);
    REQUIRE(empty_pred.joints.empty());
    const JointErrorAggregate agg = eval_joints(empty_pred, gt, {});
    // empty aggregate by contract: nothing to compare
    REQUIRE(agg.matched == 0);
    REQUIRE(agg.unmatched_gt == 4);
    REQUIRE_FALSE(agg.type_error.has_value());

    // partial drop: unmatched gt joints penalize the type error
    ArticulationPrediction partial = mock_predict(gt, {}, 5);
    partial.joints.resize(2);
    partial.links.resize(2);
    JointEvalOptions options;
    options.policy = MatchPolicy::ById;
    const JointErrorAggregate agg2 = eval_joints(partial, gt, options);
    REQUIRE(agg2.matched == 2);
    REQUIRE(agg2.unmatched_gt == 2);
    REQUIRE(*agg2.type_error == Catch::Approx(0.5));  // (0 + 0 + 1 + 1) / 4
    REQUIRE(*agg2.axis_error_rad == 0.0);             // over matched pairs only
}

TEST_CASE("type flips are fully detected", "[metrics]") {
    const UrdfModel gt = testutil::make_flat_model(
        "m", {{"a", JointType::Revolute, {}, Eigen::Vector3d::UnitZ(), JointLimit{0, 1}},
              {"b", JointType::Prismatic, {}, Eigen::Vector3d::UnitX(), JointLimit{0, 1}},
              {"c", JointType::Continuous, {}, Eigen::Vector3d::UnitY(), std::nullopt}});
    NoiseSpec noise;
    noise.type_flip_prob = 1.0;
    const ArticulationPrediction prediction = mock_predict(gt, noise, 2);
    JointEvalOptions options;
    options.policy = MatchPolicy::ById;
    REQUIRE(*eval_joints(prediction, gt, options).type_error == 1.0);
}

TEST_CASE("axis-line origin error ignores slide along revolute axes", "[metrics]") {
    const UrdfModel gt = testutil::make_flat_model(
        "m", {{"door", JointType::Revolute, {{0.2, 0.3, 0.4}, {0, 0, 0}}, Eigen::Vector3d::UnitZ(),
               JointLimit{0, 1}}});
    ArticulationPrediction prediction = mock_predict(gt, {}, 1);
    prediction.joints[0].origin.xyz += Eigen::Vector3d(0, 0, 0.75);  // slide along the axis

    JointEvalOptions plain;
    plain.policy = MatchPolicy::ById;
    REQUIRE(*eval_joints(prediction, gt, plain).origin_error_m == Catch::Approx(0.75));

    JointEvalOptions line = plain;
    line.axis_line = true;
    REQUIRE(*eval_joints(prediction, gt, line).origin_error_m == Catch::Approx(0.0).margin(1e-12));

    // perpendicular displacement is unaffected by the mode
    prediction.joints[0].origin.xyz = gt.joints[0].origin.xyz + Eigen::Vector3d(0.3, 0, 0);
    REQUIRE(*eval_joints(prediction, gt, line).origin_error_m == Catch::Approx(0.3));
}

TEST_CASE("empty aggregate when either side has no joints", "[metrics]") {
    const UrdfModel gt = testutil::make_flat_model("empty", {});
    ArticulationPrediction prediction;
    const JointErrorAggregate agg = eval_joints(prediction, gt, {});
    REQUIRE(agg.matched == 0);
    REQUIRE_FALSE(agg.type_error.has_value());
    REQUIRE_FALSE(agg.axis_error_rad.has_value());
}
