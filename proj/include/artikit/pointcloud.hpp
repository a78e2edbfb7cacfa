#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "artikit/errors.hpp"
#include "artikit/numeric.hpp"

namespace artikit {

// N x 6 cloud: columns x,y,z (meters) then r,g,b in [0,1].
struct PointCloud {
    Eigen::Matrix<double, Eigen::Dynamic, 6> points;

    int size() const { return static_cast<int>(points.rows()); }
    Eigen::Vector3d position(int i) const { return points.row(i).head<3>(); }
    Eigen::Vector3d color(int i) const { return points.row(i).tail<3>(); }
};

// Binary membership of cloud points in one named part.
struct PartMask {
    std::string part_name;
    std::vector<int> member_indices;  // sorted, unique

    bool contains(int index) const {
        return std::binary_search(member_indices.begin(), member_indices.end(), index);
    }
    int size() const { return static_cast<int>(member_indices.size()); }
};

inline bool operator==(const PartMask& a, const PartMask& b) {
    return a.part_name == b.part_name && a.member_indices == b.member_indices;
}

inline PartMask make_mask(std::string part_name, std::vector<int> indices) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    if (!indices.empty() && indices.front() < 0)
        throw IndexOutOfRangeError("mask '" + part_name + "' contains a negative index");
    return {std::move(part_name), std::move(indices)};
}

inline void validate_mask(const PartMask& mask, int n_points) {
    if (!mask.member_indices.empty() && mask.member_indices.back() >= n_points)
        throw IndexOutOfRangeError("mask '" + mask.part_name + "' index " +
                                   std::to_string(mask.member_indices.back()) + " >= point count " +
                                   std::to_string(n_points));
}

// Part names become output file names; refuse anything that could escape the
// target directory.
inline void validate_part_filename(const std::string& part_name) {
    if (part_name.empty() || part_name == "." || part_name == ".." ||
        part_name.find('/') != std::string::npos || part_name.find('\\') != std::string::npos)
        throw SchemaViolationError("part name '" + part_name + "' is not usable as a file name");
}

enum class CloudFormat { XyzRgbText, PlyAscii };

namespace detail {

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

inline PointCloud finalize_cloud(std::vector<std::array<double, 6>>&& rows,
                                 const std::filesystem::path& path) {
    if (rows.empty()) throw EmptyCloudError("no points in " + path.string());
    PointCloud cloud;
    cloud.points.resize(static_cast<Eigen::Index>(rows.size()), 6);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            if (!std::isfinite(rows[i][c]))
                throw ParseError(path.string() + ": non-finite coordinate at point " + std::to_string(i));
            cloud.points(static_cast<Eigen::Index>(i), c) = rows[i][c];
        }
        for (int c = 3; c < 6; ++c)
            cloud.points(static_cast<Eigen::Index>(i), c) = clamp01(rows[i][c]);
    }
    return cloud;
}

inline PointCloud load_xyzrgb_text(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open " + path.string());
    std::vector<std::array<double, 6>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        std::istringstream stream(line);
        std::vector<double> values;
        std::string token;
        while (stream >> token) {
            auto v = parse_double(token);
            if (!v)
                throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad float '" + token +
                                 "'");
            values.push_back(*v);
        }
        if (values.empty()) continue;  // blank line
        if (values.size() != 6)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 6 floats, got " +
                             std::to_string(values.size()));
        rows.push_back({values[0], values[1], values[2], values[3], values[4], values[5]});
    }
    return finalize_cloud(std::move(rows), path);
}

inline PointCloud load_ply_ascii(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open " + path.string());
    std::string line;
    int line_no = 0;
    auto next_line = [&]() {
        if (!std::getline(file, line))
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": unexpected end of file");
        ++line_no;
    };

    next_line();
    if (line.substr(0, 3) != "ply")
        throw ParseError(path.string() + ":1: not a PLY file");
    next_line();
    if (line.find("format ascii") != 0)
        throw ParseError(path.string() + ":2: only ascii PLY is supported");

    long vertex_count = -1;
    struct Property { std::string type, name; };
    std::vector<Property> properties;
    bool in_vertex_element = false;
    for (;;) {
        next_line();
        std::istringstream stream(line);
        std::string word;
        stream >> word;
        if (word == "comment") continue;
        if (word == "element") {
            std::string kind;
            long count = 0;
            stream >> kind >> count;
            if (kind == "vertex") {
                vertex_count = count;
                in_vertex_element = true;
            } else {
                throw ParseError(path.string() + ":" + std::to_string(line_no) + ": unsupported element '" +
                                 kind + "'");
            }
        } else if (word == "property") {
            if (!in_vertex_element)
                throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                 ": property outside vertex element");
            Property p;
            stream >> p.type >> p.name;
            properties.push_back(p);
        } else if (word == "end_header") {
            break;
        } else {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": unexpected header line '" +
                             line + "'");
        }
    }
    if (vertex_count < 0)
        throw ParseError(path.string() + ": PLY header declares no vertex element");
    if (vertex_count == 0) throw EmptyCloudError(path.string() + ": element vertex 0");

    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
    for (int i = 0; i < static_cast<int>(properties.size()); ++i) {
        const auto& name = properties[i].name;
        if (name == "x") ix = i;
        else if (name == "y") iy = i;
        else if (name == "z") iz = i;
        else if (name == "red") ir = i;
        else if (name == "green") ig = i;
        else if (name == "blue") ib = i;
    }
    if (ix < 0 || iy < 0 || iz < 0)
        throw ParseError(path.string() + ": vertex element must declare x, y, z");
    const bool has_color = ir >= 0 && ig >= 0 && ib >= 0;
    auto color_scale = [&](int prop) {
        const auto& t = properties[prop].type;
        return (t == "uchar" || t == "uint8") ? 1.0 / 255.0 : 1.0;
    };

    std::vector<std::array<double, 6>> rows;
    for (long v = 0; v < vertex_count; ++v) {
        next_line();
        std::istringstream stream(line);
        std::vector<double> values;
        std::string token;
        while (stream >> token) {
            auto val = parse_double(token);
            if (!val)
                throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad float '" + token +
                                 "'");
            values.push_back(*val);
        }
        if (values.size() != properties.size())
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(properties.size()) + " values, got " +
                             std::to_string(values.size()));
        std::array<double, 6> row{values[static_cast<std::size_t>(ix)], values[static_cast<std::size_t>(iy)],
                                  values[static_cast<std::size_t>(iz)], 0.0, 0.0, 0.0};
        if (has_color) {
            row[3] = values[static_cast<std::size_t>(ir)] * color_scale(ir);
            row[4] = values[static_cast<std::size_t>(ig)] * color_scale(ig);
            row[5] = values[static_cast<std::size_t>(ib)] * color_scale(ib);
        }
        rows.push_back(row);
    }
    return finalize_cloud(std::move(rows), path);
}

}  // namespace detail

inline PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format) {
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
    switch (format) {
        case CloudFormat::XyzRgbText: return detail::load_xyzrgb_text(path);
        case CloudFormat::PlyAscii: return detail::load_ply_ascii(path);
    }
    throw IoError("unknown cloud format");
}

inline void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format) {
    std::ofstream file(path);
    if (!file) throw IoError("cannot write " + path.string());
    if (format == CloudFormat::XyzRgbText) {
        for (int i = 0; i < cloud.size(); ++i) {
            const auto row = cloud.points.row(i);
            file << format_double(row[0]) << ' ' << format_double(row[1]) << ' ' << format_double(row[2])
                 << ' ' << format_double(row[3]) << ' ' << format_double(row[4]) << ' '
                 << format_double(row[5]) << '\n';
        }
    } else {
        file << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
             << "\nproperty double x\nproperty double y\nproperty double z\nproperty double red\n"
                "property double green\nproperty double blue\nend_header\n";
        for (int i = 0; i < cloud.size(); ++i) {
            const auto row = cloud.points.row(i);
            file << format_double(row[0]) << ' ' << format_double(row[1]) << ' ' << format_double(row[2])
                 << ' ' << format_double(row[3]) << ' ' << format_double(row[4]) << ' '
                 << format_double(row[5]) << '\n';
        }
    }
}

// Mask file: JSON object part_name -> array of point indices.
inline std::vector<PartMask> load_masks(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open " + path.string());
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(file);
    } catch (const nlohmann::json::parse_error& e) {
        throw JsonSyntaxError(path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw SchemaViolationError(path.string() + ": expected a JSON object");
    std::vector<PartMask> masks;
    for (const auto& [name, value] : doc.items()) {
        if (!value.is_array())
            throw SchemaViolationError(path.string() + ": \"" + name + "\" must be an index array");
        std::vector<int> indices;
        for (const auto& v : value) {
            if (!v.is_number_integer())
                throw SchemaViolationError(path.string() + ": \"" + name + "\" has a non-integer index");
            indices.push_back(v.get<int>());
        }
        masks.push_back(make_mask(name, std::move(indices)));
    }
    return masks;
}

inline void save_masks(const std::vector<PartMask>& masks, const std::filesystem::path& path) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& mask : masks) doc[mask.part_name] = mask.member_indices;
    std::ofstream file(path);
    if (!file) throw IoError("cannot write " + path.string());
    file << doc.dump(2) << '\n';
}

}  // namespace artikit
