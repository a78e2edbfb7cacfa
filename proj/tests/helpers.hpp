#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "artikit/kinematics.hpp"
#include "artikit/mesh.hpp"
#include "artikit/urdf.hpp"

namespace testutil {

inline std::filesystem::path fixture_path(const std::string& name) {
    return std::filesystem::path(ARTIKIT_FIXTURE_DIR) / name;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream file(path);
    std::stringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream file(path);
    file << content;
}

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("artikit-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Axis-aligned box as 12 triangles.
inline artikit::TriMesh make_box_mesh(const Eigen::Vector3d& center, const Eigen::Vector3d& half) {
    artikit::TriMesh mesh;
    for (int i = 0; i < 8; ++i)
        mesh.vertices.push_back(center + Eigen::Vector3d((i & 1 ? 1 : -1) * half.x(),
                                                         (i & 2 ? 1 : -1) * half.y(),
                                                         (i & 4 ? 1 : -1) * half.z()));
    mesh.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                  {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
    return mesh;
}

// Flat model rooted at "base": every part is attached to the root by one joint.
struct PartSpec {
    std::string name;
    artikit::JointType type;
    artikit::Pose origin;
    Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
    std::optional<artikit::JointLimit> limit;
};

inline artikit::UrdfModel make_flat_model(const std::string& name, const std::vector<PartSpec>& parts) {
    artikit::UrdfModel model;
    model.name = name;
    artikit::LinkSpec base;
    base.name = "base";
    model.links.push_back(base);
    int index = 0;
    for (const auto& part : parts) {
        artikit::LinkSpec link;
        link.name = part.name;
        model.links.push_back(link);
        artikit::JointSpec joint;
        joint.id = "joint_" + std::to_string(index++);
        joint.type = part.type;
        joint.parent = "base";
        joint.child = part.name;
        joint.origin = part.origin;
        joint.axis = part.axis;
        joint.limit = part.limit;
        if (artikit::requires_limit(part.type) && !joint.limit)
            joint.limit = artikit::JointLimit{0.0, 1.0};
        model.joints.push_back(joint);
    }
    return model;
}

// Random valid model with nested chains, for fuzzing round-trips and the
// regularizer. Depth-limited tree; revolute/prismatic joints carry limits.
inline artikit::UrdfModel make_random_model(std::mt19937& gen, int max_depth = 4) {
    std::uniform_int_distribution<int> child_count(1, 3);
    std::uniform_real_distribution<double> coords(-1.0, 1.0);
    std::uniform_int_distribution<int> type_pick(0, 3);

    artikit::UrdfModel model;
    model.name = "fuzz";
    artikit::LinkSpec base;
    base.name = "base";
    model.links.push_back(base);

    int link_counter = 0;
    int joint_counter = 0;
    // (parent name, depth)
    std::vector<std::pair<std::string, int>> frontier{{"base", 0}};
    while (!frontier.empty()) {
        auto [parent, depth] = frontier.back();
        frontier.pop_back();
        if (depth >= max_depth) continue;
        const int children = depth == 0 ? std::max(1, child_count(gen)) : child_count(gen) - 1;
        for (int c = 0; c < children; ++c) {
            artikit::LinkSpec link;
            link.name = "link_" + std::to_string(link_counter++);
            link.inertial.mass = 0.5 + std::fabs(coords(gen));
            artikit::JointSpec joint;
            joint.id = "joint_" + std::to_string(joint_counter++);
            switch (type_pick(gen)) {
                case 0: joint.type = artikit::JointType::Revolute; break;
                case 1: joint.type = artikit::JointType::Prismatic; break;
                case 2: joint.type = artikit::JointType::Continuous; break;
                default: joint.type = artikit::JointType::Fixed; break;
            }
            joint.parent = parent;
            joint.child = link.name;
            joint.origin.xyz = {coords(gen), coords(gen), coords(gen)};
            joint.origin.rpy = {coords(gen), coords(gen), coords(gen)};
            Eigen::Vector3d axis{coords(gen), coords(gen), coords(gen)};
            while (axis.norm() < 1e-3) axis = {coords(gen), coords(gen), coords(gen)};
            joint.axis = axis.normalized();
            if (artikit::requires_limit(joint.type)) {
                const double a = coords(gen), b = coords(gen);
                joint.limit = artikit::JointLimit{std::min(a, b), std::max(a, b)};
            }
            model.links.push_back(link);
            model.joints.push_back(joint);
            frontier.emplace_back(link.name, depth + 1);
        }
    }
    return model;
}

// A self-contained evaluation object: ground-truth URDF, a cloud whose points
// group into per-part boxes, and the matching mask file. Some objects get a
// nested chain (exercising the regularizer) and some carry an explicit base
// mask.
inline void write_pipeline_object(const std::filesystem::path& dir, int variant, std::mt19937& gen) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    struct Part {
        std::string name;
        artikit::JointType type;
        artikit::Pose origin;
        Eigen::Vector3d axis;
        std::optional<artikit::JointLimit> limit;
        std::string parent = "base";
    };
    std::vector<Part> parts;
    parts.push_back({"link_0", artikit::JointType::Revolute,
                     {{0.45, 0.1 * variant, 0.2}, {0, 0, 0.2}},
                     Eigen::Vector3d::UnitZ(),
                     artikit::JointLimit{0.0, 1.2},
                     "base"});
    parts.push_back({"link_1", artikit::JointType::Prismatic,
                     {{-0.5, 0.2, 0.0}, {0, 0, 0}},
                     Eigen::Vector3d::UnitX(),
                     artikit::JointLimit{0.0, 0.3},
                     "base"});
    if (variant % 3 != 0)
        parts.push_back({"link_2", artikit::JointType::Continuous,
                         {{0.0, -0.55, 0.25}, {0.2, 0, 0}},
                         Eigen::Vector3d::UnitY(),
                         std::nullopt,
                         "base"});
    if (variant % 2 == 1)  // nested chain: link_3 hangs off link_0
        parts.push_back({"link_3", artikit::JointType::Fixed,
                         {{0.0, 0.3, 0.1}, {0, 0, 0}},
                         Eigen::Vector3d::UnitX(),
                         std::nullopt,
                         "link_0"});

    artikit::UrdfModel model;
    model.name = "object_" + std::to_string(variant);
    artikit::LinkSpec base;
    base.name = "base";
    model.links.push_back(base);
    int joint_index = 0;
    for (const auto& part : parts) {
        artikit::LinkSpec link;
        link.name = part.name;
        model.links.push_back(link);
        artikit::JointSpec joint;
        joint.id = "joint_" + std::to_string(joint_index++);
        joint.type = part.type;
        joint.parent = part.parent;
        joint.child = part.name;
        joint.origin = part.origin;
        joint.axis = part.axis;
        joint.limit = part.limit;
        model.joints.push_back(joint);
    }
    write_file(dir / "model.urdf", artikit::emit_urdf(model));

    // cloud: one box of points per part at its rest-pose position, plus base points
    const auto world = artikit::forward_kinematics(
        model, [&] {
            artikit::JointConfiguration q;
            for (const auto& j : model.joints)
                if (j.type != artikit::JointType::Fixed) q[j.id] = 0.0;
            return q;
        }());
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<std::array<double, 6>> rows;
    nlohmann::ordered_json masks = nlohmann::ordered_json::object();
    auto add_box = [&](const Eigen::Vector3d& center, const Eigen::Vector3d& half, int count,
                       std::vector<int>* indices) {
        for (int i = 0; i < count; ++i) {
            const Eigen::Vector3d p =
                center + Eigen::Vector3d(half.x() * unit(gen), half.y() * unit(gen), half.z() * unit(gen));
            if (indices) indices->push_back(static_cast<int>(rows.size()));
            rows.push_back({p.x(), p.y(), p.z(), 0.5, 0.5, 0.5});
        }
    };

    std::vector<int> base_indices;
    add_box({0, 0, 0}, {0.3, 0.3, 0.15}, 50, &base_indices);
    for (const auto& part : parts) {
        std::vector<int> indices;
        add_box(world.at(part.name).translation(), {0.12, 0.1, 0.08}, 40, &indices);
        masks[part.name] = indices;
    }
    if (variant % 2 == 0) masks["base"] = base_indices;  // otherwise left to the remainder rule

    std::ostringstream cloud_text;
    for (const auto& row : rows) {
        for (int c = 0; c < 6; ++c) cloud_text << (c ? " " : "") << artikit::format_double(row[c]);
        cloud_text << '\n';
    }
    write_file(dir / "cloud.xyzrgb", cloud_text.str());
    write_file(dir / "masks.json", masks.dump(2) + "\n");
}

inline void write_pipeline_fixture(const std::filesystem::path& root, int objects, unsigned seed) {
    std::mt19937 gen(seed);
    for (int i = 0; i < objects; ++i)
        write_pipeline_object(root / ("obj_" + std::to_string(i)), i, gen);
}

}  // namespace testutil
