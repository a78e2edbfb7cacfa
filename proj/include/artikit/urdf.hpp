#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "artikit/errors.hpp"
#include "artikit/numeric.hpp"
#include "artikit/pose.hpp"
#include "artikit/xml.hpp"

namespace artikit {

enum class JointType { Prismatic, Revolute, Continuous, Floating, Planar, Fixed };

inline const char* to_string(JointType t) {
    switch (t) {
        case JointType::Prismatic: return "prismatic";
        case JointType::Revolute: return "revolute";
        case JointType::Continuous: return "continuous";
        case JointType::Floating: return "floating";
        case JointType::Planar: return "planar";
        case JointType::Fixed: return "fixed";
    }
    return "?";
}

inline std::optional<JointType> joint_type_from_string(std::string_view s) {
    if (s == "prismatic") return JointType::Prismatic;
    if (s == "revolute") return JointType::Revolute;
    if (s == "continuous") return JointType::Continuous;
    if (s == "floating") return JointType::Floating;
    if (s == "planar") return JointType::Planar;
    if (s == "fixed") return JointType::Fixed;
    return std::nullopt;
}

// A joint moves if actuating it changes the child pose.
inline bool is_moving(JointType t) {
    return t == JointType::Prismatic || t == JointType::Revolute || t == JointType::Continuous ||
           t == JointType::Planar;
}

inline bool requires_limit(JointType t) {
    return t == JointType::Prismatic || t == JointType::Revolute;
}

struct JointLimit {
    double lower = 0.0;
    double upper = 0.0;
};

inline bool operator==(const JointLimit& a, const JointLimit& b) {
    return a.lower == b.lower && a.upper == b.upper;
}

struct JointSpec {
    std::string id;
    JointType type = JointType::Fixed;
    std::string parent;
    std::string child;
    Pose origin;
    Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
    std::optional<JointLimit> limit;
};

inline bool operator==(const JointSpec& a, const JointSpec& b) {
    return a.id == b.id && a.type == b.type && a.parent == b.parent && a.child == b.child &&
           a.origin == b.origin && (a.axis.array() == b.axis.array()).all() && a.limit == b.limit;
}

struct Material {
    std::string name;
    std::optional<Eigen::Vector4d> rgba;
};

inline bool operator==(const Material& a, const Material& b) {
    if (a.name != b.name || a.rgba.has_value() != b.rgba.has_value()) return false;
    return !a.rgba || (a.rgba->array() == b.rgba->array()).all();
}

// One <visual> or <collision> mesh reference with its local transform.
struct GeometryRef {
    std::string mesh_path;
    Pose origin;
    std::optional<Material> material;  // visual entries only
};

inline bool operator==(const GeometryRef& a, const GeometryRef& b) {
    return a.mesh_path == b.mesh_path && a.origin == b.origin && a.material == b.material;
}

struct Inertial {
    double mass = 1.0;
    Eigen::Vector3d inertia_diag = Eigen::Vector3d::Constant(1e-3);
    Pose origin;
};

inline bool operator==(const Inertial& a, const Inertial& b) {
    return a.mass == b.mass && (a.inertia_diag.array() == b.inertia_diag.array()).all() &&
           a.origin == b.origin;
}

struct LinkSpec {
    std::string name;
    std::vector<GeometryRef> visuals;
    std::vector<GeometryRef> collisions;
    Inertial inertial;
};

inline bool operator==(const LinkSpec& a, const LinkSpec& b) {
    return a.name == b.name && a.visuals == b.visuals && a.collisions == b.collisions &&
           a.inertial == b.inertial;
}

struct UrdfModel {
    std::string name;
    std::vector<LinkSpec> links;
    std::vector<JointSpec> joints;

    const LinkSpec* find_link(std::string_view link_name) const {
        for (const auto& l : links)
            if (l.name == link_name) return &l;
        return nullptr;
    }

    const JointSpec* find_joint(std::string_view joint_id) const {
        for (const auto& j : joints)
            if (j.id == joint_id) return &j;
        return nullptr;
    }

    // Links that never appear as a joint's child.
    std::vector<std::string> root_links() const {
        std::set<std::string> children;
        for (const auto& j : joints) children.insert(j.child);
        std::vector<std::string> roots;
        for (const auto& l : links)
            if (!children.count(l.name)) roots.push_back(l.name);
        return roots;
    }
};

inline bool operator==(const UrdfModel& a, const UrdfModel& b) {
    return a.name == b.name && a.links == b.links && a.joints == b.joints;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

// Tree-structure defects: duplicate names, dangling references, multiple
// parents, multiple roots, cycles, disconnected links. Empty result = valid.
inline std::vector<std::string> check_tree(const UrdfModel& model) {
    std::vector<std::string> issues;
    std::set<std::string> names;
    for (const auto& l : model.links) {
        if (l.name.empty()) issues.push_back("link with empty name");
        if (!names.insert(l.name).second) issues.push_back("duplicate link name '" + l.name + "'");
    }
    std::map<std::string, int> parent_count;
    for (const auto& j : model.joints) {
        if (!names.count(j.parent))
            issues.push_back("joint '" + j.id + "' references unknown parent link '" + j.parent + "'");
        if (!names.count(j.child))
            issues.push_back("joint '" + j.id + "' references unknown child link '" + j.child + "'");
        if (j.parent == j.child)
            issues.push_back("joint '" + j.id + "' connects link '" + j.parent + "' to itself (cycle)");
        parent_count[j.child]++;
    }
    for (const auto& [link, count] : parent_count)
        if (count > 1)
            issues.push_back("link '" + link + "' is the child of " + std::to_string(count) + " joints");
    if (!issues.empty()) return issues;

    auto roots = model.root_links();
    if (roots.empty()) {
        issues.push_back("no root link: every link is some joint's child (cycle)");
        return issues;
    }
    if (roots.size() > 1) {
        std::string msg = "multiple root links:";
        for (const auto& r : roots) msg += " '" + r + "'";
        issues.push_back(msg);
        return issues;
    }
    // reachability from the unique root
    std::multimap<std::string, std::string> edges;
    for (const auto& j : model.joints) edges.emplace(j.parent, j.child);
    std::set<std::string> seen{roots[0]};
    std::vector<std::string> stack{roots[0]};
    while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        auto [lo, hi] = edges.equal_range(cur);
        for (auto it = lo; it != hi; ++it)
            if (seen.insert(it->second).second) stack.push_back(it->second);
    }
    for (const auto& l : model.links)
        if (!seen.count(l.name)) issues.push_back("link '" + l.name + "' is not connected to the root");
    return issues;
}

// Joint/link parameter defects: axes, limits, masses, non-finite values.
inline std::vector<std::string> check_parameters(const UrdfModel& model) {
    std::vector<std::string> issues;
    for (const auto& j : model.joints) {
        if (!j.origin.xyz.allFinite() || !j.origin.rpy.allFinite())
            issues.push_back("joint '" + j.id + "' has a non-finite origin");
        if (!j.axis.allFinite()) {
            issues.push_back("joint '" + j.id + "' has a non-finite axis");
            continue;
        }
        if (is_moving(j.type)) {
            const double n = j.axis.norm();
            if (n < 1e-12)
                issues.push_back("joint '" + j.id + "' is " + to_string(j.type) + " but has a zero axis");
            else if (std::fabs(n - 1.0) > 1e-6)
                issues.push_back("joint '" + j.id + "' axis is not unit length (|axis| = " +
                                 format_double(n) + ")");
        }
        if (requires_limit(j.type)) {
            if (!j.limit)
                issues.push_back("joint '" + j.id + "' is " + to_string(j.type) + " but has no limit");
            else if (j.limit->lower > j.limit->upper)
                issues.push_back("joint '" + j.id + "' limit lower > upper");
        }
        if (j.limit && (!std::isfinite(j.limit->lower) || !std::isfinite(j.limit->upper)))
            issues.push_back("joint '" + j.id + "' has a non-finite limit");
    }
    for (const auto& l : model.links) {
        if (!(l.inertial.mass > 0.0) || !std::isfinite(l.inertial.mass))
            issues.push_back("link '" + l.name + "' mass must be positive");
        if (!l.inertial.inertia_diag.allFinite())
            issues.push_back("link '" + l.name + "' has non-finite inertia");
    }
    return issues;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline void warn(std::vector<std::string>* warnings, const std::string& message) {
    if (warnings) warnings->push_back(message);
}

inline double require_double(const XmlNode& node, const std::string& attr) {
    const std::string* raw = node.attribute(attr);
    if (!raw)
        throw SchemaViolationError("<" + node.name + "> missing attribute '" + attr + "' (line " +
                                   std::to_string(node.line) + ")");
    auto value = parse_double(*raw);
    if (!value)
        throw SchemaViolationError("<" + node.name + "> attribute '" + attr + "': bad float '" + *raw +
                                   "' (line " + std::to_string(node.line) + ")");
    return *value;
}

inline double optional_double(const XmlNode& node, const std::string& attr, double fallback) {
    const std::string* raw = node.attribute(attr);
    if (!raw) return fallback;
    auto value = parse_double(*raw);
    if (!value)
        throw SchemaViolationError("<" + node.name + "> attribute '" + attr + "': bad float '" + *raw +
                                   "' (line " + std::to_string(node.line) + ")");
    return *value;
}

inline Eigen::Vector3d parse_triple(const XmlNode& node, const std::string& attr,
                                    const Eigen::Vector3d& fallback) {
    const std::string* raw = node.attribute(attr);
    if (!raw) return fallback;
    std::istringstream stream(*raw);
    std::vector<double> values;
    std::string token;
    while (stream >> token) {
        auto v = parse_double(token);
        if (!v)
            throw SchemaViolationError("<" + node.name + "> attribute '" + attr + "': bad float '" +
                                       token + "' (line " + std::to_string(node.line) + ")");
        values.push_back(*v);
    }
    if (values.size() != 3)
        throw SchemaViolationError("<" + node.name + "> attribute '" + attr + "': expected 3 floats, got " +
                                   std::to_string(values.size()) + " (line " + std::to_string(node.line) +
                                   ")");
    return {values[0], values[1], values[2]};
}

inline Pose parse_origin(const XmlNode* origin) {
    Pose pose;
    if (!origin) return pose;
    pose.xyz = parse_triple(*origin, "xyz", Eigen::Vector3d::Zero());
    pose.rpy = parse_triple(*origin, "rpy", Eigen::Vector3d::Zero());
    return pose;
}

inline const std::string& require_attr(const XmlNode& node, const std::string& attr) {
    const std::string* raw = node.attribute(attr);
    if (!raw)
        throw SchemaViolationError("<" + node.name + "> missing attribute '" + attr + "' (line " +
                                   std::to_string(node.line) + ")");
    return *raw;
}

inline std::optional<GeometryRef> parse_geometry_ref(const XmlNode& node, bool allow_material,
                                                     std::vector<std::string>* warnings) {
    GeometryRef ref;
    ref.origin = parse_origin(node.child("origin"));
    for (const auto& c : node.children) {
        const bool known = c.name == "origin" || c.name == "geometry" ||
                           (allow_material && c.name == "material");
        if (!known)
            warn(warnings, "ignoring unknown element <" + c.name + "> in <" + node.name + "> (line " +
                               std::to_string(c.line) + ")");
    }
    const XmlNode* geometry = node.child("geometry");
    if (!geometry)
        throw SchemaViolationError("<" + node.name + "> missing <geometry> (line " +
                                   std::to_string(node.line) + ")");
    const XmlNode* mesh = geometry->child("mesh");
    if (!mesh) {
        warn(warnings, "ignoring <" + node.name + "> with non-mesh geometry (line " +
                           std::to_string(geometry->line) + ")");
        return std::nullopt;
    }
    ref.mesh_path = require_attr(*mesh, "filename");
    if (mesh->attribute("scale"))
        warn(warnings, "ignoring mesh scale attribute (line " + std::to_string(mesh->line) + ")");
    if (allow_material) {
        if (const XmlNode* material = node.child("material")) {
            Material m;
            if (const std::string* name = material->attribute("name")) m.name = *name;
            if (const XmlNode* color = material->child("color")) {
                const std::string* raw = color->attribute("rgba");
                if (raw) {
                    std::istringstream stream(*raw);
                    std::vector<double> values;
                    std::string token;
                    while (stream >> token) {
                        auto v = parse_double(token);
                        if (!v)
                            throw SchemaViolationError("<color> attribute 'rgba': bad float '" + token +
                                                       "' (line " + std::to_string(color->line) + ")");
                        values.push_back(*v);
                    }
                    if (values.size() != 4)
                        throw SchemaViolationError("<color> attribute 'rgba': expected 4 floats (line " +
                                                   std::to_string(color->line) + ")");
                    m.rgba = Eigen::Vector4d(values[0], values[1], values[2], values[3]);
                }
            }
            ref.material = std::move(m);
        }
    }
    return ref;
}

inline LinkSpec parse_link(const XmlNode& node, std::vector<std::string>* warnings) {
    LinkSpec link;
    link.name = require_attr(node, "name");
    for (const auto& child : node.children) {
        if (child.name == "visual") {
            if (auto ref = parse_geometry_ref(child, true, warnings)) link.visuals.push_back(*ref);
        } else if (child.name == "collision") {
            if (auto ref = parse_geometry_ref(child, false, warnings)) link.collisions.push_back(*ref);
        } else if (child.name == "inertial") {
            Inertial inertial;
            inertial.origin = parse_origin(child.child("origin"));
            for (const auto& c : child.children)
                if (c.name != "origin" && c.name != "mass" && c.name != "inertia")
                    warn(warnings, "ignoring unknown element <" + c.name + "> in <inertial> (line " +
                                       std::to_string(c.line) + ")");
            const XmlNode* mass = child.child("mass");
            if (!mass)
                throw SchemaViolationError("<inertial> missing <mass> (line " +
                                           std::to_string(child.line) + ")");
            inertial.mass = require_double(*mass, "value");
            if (const XmlNode* inertia = child.child("inertia")) {
                inertial.inertia_diag = {require_double(*inertia, "ixx"), require_double(*inertia, "iyy"),
                                         require_double(*inertia, "izz")};
                const double ixy = optional_double(*inertia, "ixy", 0.0);
                const double ixz = optional_double(*inertia, "ixz", 0.0);
                const double iyz = optional_double(*inertia, "iyz", 0.0);
                if (ixy != 0.0 || ixz != 0.0 || iyz != 0.0)
                    warn(warnings, "link '" + link.name +
                                       "': off-diagonal inertia terms are not representable and were "
                                       "dropped");
            }
            link.inertial = inertial;
        } else {
            warn(warnings, "ignoring unknown element <" + child.name + "> in <link '" + link.name +
                               "'> (line " + std::to_string(child.line) + ")");
        }
    }
    return link;
}

inline JointSpec parse_joint(const XmlNode& node, bool validate, std::vector<std::string>* warnings) {
    JointSpec joint;
    joint.id = require_attr(node, "name");
    const std::string& type_text = require_attr(node, "type");
    auto type = joint_type_from_string(type_text);
    if (!type)
        throw SchemaViolationError("joint '" + joint.id + "': unknown type '" + type_text + "' (line " +
                                   std::to_string(node.line) + ")");
    joint.type = *type;

    const XmlNode* parent = node.child("parent");
    const XmlNode* child = node.child("child");
    if (!parent || !child)
        throw SchemaViolationError("joint '" + joint.id + "' missing <parent> or <child> (line " +
                                   std::to_string(node.line) + ")");
    joint.parent = require_attr(*parent, "link");
    joint.child = require_attr(*child, "link");

    joint.origin = parse_origin(node.child("origin"));
    if (const XmlNode* axis = node.child("axis"))
        joint.axis = parse_triple(*axis, "xyz", Eigen::Vector3d::UnitX());

    if (const XmlNode* limit = node.child("limit")) {
        JointLimit l;
        l.lower = optional_double(*limit, "lower", 0.0);
        l.upper = optional_double(*limit, "upper", 0.0);
        if (joint.type == JointType::Continuous) {
            warn(warnings, "joint '" + joint.id + "': <limit> on a continuous joint ignored");
        } else {
            joint.limit = l;
        }
    }

    for (const auto& c : node.children) {
        static const std::set<std::string> known{"parent", "child", "origin", "axis", "limit"};
        if (!known.count(c.name))
            warn(warnings, "ignoring unknown element <" + c.name + "> in <joint '" + joint.id +
                               "'> (line " + std::to_string(c.line) + ")");
    }

    // canonicalize the axis of moving joints; non-finite axes are left for
    // validation to reject rather than renormalized into NaN
    if (is_moving(joint.type) && joint.axis.allFinite()) {
        const double n = joint.axis.norm();
        if (n < 1e-12) {
            if (validate)
                throw SchemaViolationError("joint '" + joint.id + "' is " + to_string(joint.type) +
                                           " but has a zero axis");
        } else if (std::fabs(n - 1.0) > 1e-6) {
            joint.axis /= n;
            warn(warnings, "joint '" + joint.id + "': axis renormalized (|axis| was " + format_double(n) +
                               ")");
        }
    }
    return joint;
}

inline UrdfModel parse_urdf_impl(const std::string& xml_text, bool validate,
                                 std::vector<std::string>* warnings) {
    XmlNode root = parse_xml(xml_text);
    if (root.name != "robot")
        throw SchemaViolationError("root element must be <robot>, found <" + root.name + ">");
    UrdfModel model;
    model.name = require_attr(root, "name");
    for (const auto& child : root.children) {
        if (child.name == "link") {
            model.links.push_back(parse_link(child, warnings));
        } else if (child.name == "joint") {
            model.joints.push_back(parse_joint(child, validate, warnings));
        } else {
            warn(warnings, "ignoring unknown element <" + child.name + "> in <robot> (line " +
                               std::to_string(child.line) + ")");
        }
    }
    if (validate) {
        auto tree_issues = check_tree(model);
        if (!tree_issues.empty()) throw TreeViolationError(tree_issues.front());
        auto param_issues = check_parameters(model);
        if (!param_issues.empty()) throw SchemaViolationError(param_issues.front());
    }
    return model;
}

}  // namespace detail

// Parse URDF XML and enforce every model invariant. Throws XmlSyntaxError,
// SchemaViolationError or TreeViolationError.
inline UrdfModel parse_urdf(const std::string& xml_text, std::vector<std::string>* warnings = nullptr) {
    return detail::parse_urdf_impl(xml_text, true, warnings);
}

// Syntax and schema checks only; tree and parameter validation are left to
// the caller (used by staged diagnostics such as the executability checker).
inline UrdfModel parse_urdf_lenient(const std::string& xml_text,
                                    std::vector<std::string>* warnings = nullptr) {
    return detail::parse_urdf_impl(xml_text, false, warnings);
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace detail {

inline std::string triple(const Eigen::Vector3d& v) {
    return format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z());
}

inline void emit_origin(std::string& out, const Pose& pose, const std::string& indent) {
    if ((pose.xyz.array() == 0.0).all() && (pose.rpy.array() == 0.0).all()) return;
    out += indent + "<origin xyz=\"" + triple(pose.xyz) + "\" rpy=\"" + triple(pose.rpy) + "\"/>\n";
}

inline void emit_geometry_ref(std::string& out, const GeometryRef& ref, const std::string& tag) {
    out += "    <" + tag + ">\n";
    emit_origin(out, ref.origin, "      ");
    out += "      <geometry>\n";
    out += "        <mesh filename=\"" + xml_escape(ref.mesh_path) + "\"/>\n";
    out += "      </geometry>\n";
    if (ref.material) {
        out += "      <material name=\"" + xml_escape(ref.material->name) + "\"";
        if (ref.material->rgba) {
            const auto& c = *ref.material->rgba;
            out += ">\n        <color rgba=\"" + format_double(c[0]) + " " + format_double(c[1]) + " " +
                   format_double(c[2]) + " " + format_double(c[3]) + "\"/>\n      </material>\n";
        } else {
            out += "/>\n";
        }
    }
    out += "    </" + tag + ">\n";
}

}  // namespace detail

// Canonical XML: all links then all joints, in model order; shortest
// round-trip float formatting. parse_urdf(emit_urdf(m)) == m structurally.
inline std::string emit_urdf(const UrdfModel& model) {
    {
        auto issues = check_tree(model);
        auto params = check_parameters(model);
        issues.insert(issues.end(), params.begin(), params.end());
        if (!issues.empty()) throw InvariantViolationError(issues.front());
    }
    std::string out = "<?xml version=\"1.0\"?>\n";
    out += "<robot name=\"" + xml_escape(model.name) + "\">\n";
    for (const auto& link : model.links) {
        out += "  <link name=\"" + xml_escape(link.name) + "\">\n";
        for (const auto& v : link.visuals) detail::emit_geometry_ref(out, v, "visual");
        for (const auto& c : link.collisions) detail::emit_geometry_ref(out, c, "collision");
        out += "    <inertial>\n";
        detail::emit_origin(out, link.inertial.origin, "      ");
        out += "      <mass value=\"" + format_double(link.inertial.mass) + "\"/>\n";
        const auto& d = link.inertial.inertia_diag;
        out += "      <inertia ixx=\"" + format_double(d.x()) + "\" iyy=\"" + format_double(d.y()) +
               "\" izz=\"" + format_double(d.z()) + "\" ixy=\"0\" ixz=\"0\" iyz=\"0\"/>\n";
        out += "    </inertial>\n";
        out += "  </link>\n";
    }
    for (const auto& joint : model.joints) {
        out += "  <joint name=\"" + xml_escape(joint.id) + "\" type=\"" +
               std::string(to_string(joint.type)) + "\">\n";
        detail::emit_origin(out, joint.origin, "    ");
        out += "    <parent link=\"" + xml_escape(joint.parent) + "\"/>\n";
        out += "    <child link=\"" + xml_escape(joint.child) + "\"/>\n";
        out += "    <axis xyz=\"" + detail::triple(joint.axis) + "\"/>\n";
        if (joint.limit)
            out += "    <limit lower=\"" + format_double(joint.limit->lower) + "\" upper=\"" +
                   format_double(joint.limit->upper) + "\"/>\n";
        out += "  </joint>\n";
    }
    out += "</robot>\n";
    return out;
}

// Links that are the child of at least one non-fixed joint. This is the
// "articulated parts" count used by dataset filtering and count accuracy.
inline int articulated_part_count(const UrdfModel& model) {
    std::set<std::string> parts;
    for (const auto& j : model.joints)
        if (j.type != JointType::Fixed) parts.insert(j.child);
    return static_cast<int>(parts.size());
}

}  // namespace artikit
