#pragma once

#include <algorithm>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "artikit/executability.hpp"
#include "artikit/metrics.hpp"

namespace artikit {

struct ObjectResult {
    std::string object_id;
    std::optional<ExecutabilityVerdict> verdict;
    std::optional<JointErrorAggregate> joint_errors;
    std::optional<SegEvalResult> seg;
    std::optional<bool> count_acc;  // articulated-part count match (non-fixed-joint children)
    std::string error;              // pipeline failure before evaluation, if any
};

struct SplitAggregate {
    int objects = 0;
    std::optional<double> executability_rate;
    std::optional<double> miou;
    std::optional<double> count_acc;
    std::optional<double> type_error;
    std::optional<double> axis_error_rad;
    std::optional<double> origin_error_m;
    std::map<std::string, double> failure_breakdown;  // category -> fraction of split objects
};

struct EvalReport {
    std::vector<ObjectResult> objects;              // sorted by object id
    std::map<std::string, SplitAggregate> splits;   // "All" plus any provided labels
};

namespace detail {

inline SplitAggregate aggregate_split(const std::vector<const ObjectResult*>& members) {
    SplitAggregate agg;
    agg.objects = static_cast<int>(members.size());
    int verdicts = 0, passed = 0;
    double miou_sum = 0.0;
    int miou_n = 0;
    int count_n = 0, count_true = 0;
    double type_sum = 0.0, axis_sum = 0.0, origin_sum = 0.0;
    int type_n = 0, axis_n = 0, origin_n = 0;
    std::map<std::string, int> failures;
    for (const ObjectResult* r : members) {
        if (r->verdict) {
            ++verdicts;
            if (r->verdict->passed) ++passed;
            else failures[to_string(r->verdict->failure_category)]++;
        }
        if (r->seg) {
            miou_sum += r->seg->miou;
            ++miou_n;
        }
        if (r->count_acc) {
            ++count_n;
            if (*r->count_acc) ++count_true;
        }
        if (r->joint_errors) {
            if (r->joint_errors->type_error) {
                type_sum += *r->joint_errors->type_error;
                ++type_n;
            }
            if (r->joint_errors->axis_error_rad) {
                axis_sum += *r->joint_errors->axis_error_rad;
                ++axis_n;
            }
            if (r->joint_errors->origin_error_m) {
                origin_sum += *r->joint_errors->origin_error_m;
                ++origin_n;
            }
        }
    }
    if (verdicts > 0) {
        agg.executability_rate = static_cast<double>(passed) / verdicts;
        for (const auto& [category, count] : failures)
            agg.failure_breakdown[category] = static_cast<double>(count) / verdicts;
    }
    if (miou_n > 0) agg.miou = miou_sum / miou_n;
    if (count_n > 0) agg.count_acc = static_cast<double>(count_true) / count_n;
    if (type_n > 0) agg.type_error = type_sum / type_n;
    if (axis_n > 0) agg.axis_error_rad = axis_sum / axis_n;
    if (origin_n > 0) agg.origin_error_m = origin_sum / origin_n;
    return agg;
}

}  // namespace detail

// Merge per-object results into per-split means. Results may arrive in any
// order; the output is sorted by object id. When split_labels is nonempty it
// must label exactly the given objects (KeyMismatch otherwise); splits with
// no members are absent rather than zero.
inline EvalReport aggregate_report(std::vector<ObjectResult> results,
                                   const std::map<std::string, std::string>& split_labels) {
    EvalReport report;
    std::sort(results.begin(), results.end(),
              [](const ObjectResult& a, const ObjectResult& b) { return a.object_id < b.object_id; });
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].object_id == results[i - 1].object_id)
            throw KeyMismatchError("duplicate object id '" + results[i].object_id + "'");

    if (!split_labels.empty()) {
        for (const auto& r : results)
            if (!split_labels.count(r.object_id))
                throw KeyMismatchError("object '" + r.object_id + "' has no split label");
        for (const auto& entry : split_labels) {
            const std::string& id = entry.first;
            const bool known = std::any_of(results.begin(), results.end(),
                                           [&](const ObjectResult& r) { return r.object_id == id; });
            if (!known) throw KeyMismatchError("split label for unknown object '" + id + "'");
        }
    }

    report.objects = std::move(results);
    std::map<std::string, std::vector<const ObjectResult*>> groups;
    for (const auto& r : report.objects) {
        groups["All"].push_back(&r);
        if (!split_labels.empty()) groups[split_labels.at(r.object_id)].push_back(&r);
    }
    for (const auto& [label, members] : groups) report.splits[label] = detail::aggregate_split(members);
    return report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json report_to_json(const EvalReport& report) {
    using json = nlohmann::ordered_json;
    json doc;
    doc["objects"] = json::array();
    for (const auto& r : report.objects) {
        json o;
        o["id"] = r.object_id;
        if (!r.error.empty()) o["error"] = r.error;
        if (r.verdict) {
            o["executability"]["passed"] = r.verdict->passed;
            o["executability"]["failure_category"] = to_string(r.verdict->failure_category);
            json checks = json::array();
            for (const auto& c : r.verdict->details) {
                json rec;
                rec["check"] = c.check;
                rec["passed"] = c.passed;
                if (!c.detail.empty()) rec["detail"] = c.detail;
                checks.push_back(std::move(rec));
            }
            o["executability"]["checks"] = std::move(checks);
        }
        if (r.joint_errors) {
            const auto& je = *r.joint_errors;
            json j;
            if (je.type_error) j["type_error"] = *je.type_error;
            if (je.axis_error_rad) j["axis_error_rad"] = *je.axis_error_rad;
            if (je.origin_error_m) j["origin_error_m"] = *je.origin_error_m;
            j["matched"] = je.matched;
            j["unmatched_pred"] = je.unmatched_pred;
            j["unmatched_gt"] = je.unmatched_gt;
            o["joints"] = std::move(j);
        }
        if (r.seg) {
            o["segmentation"]["miou"] = r.seg->miou;
            o["segmentation"]["mask_count_match"] = r.seg->count_match;
        }
        if (r.count_acc) o["count_match"] = *r.count_acc;
        doc["objects"].push_back(std::move(o));
    }
    doc["splits"] = json::object();
    for (const auto& [label, agg] : report.splits) {
        json s;
        s["objects"] = agg.objects;
        if (agg.executability_rate) s["executability_rate"] = *agg.executability_rate;
        if (agg.miou) s["miou"] = *agg.miou;
        if (agg.count_acc) s["count_acc"] = *agg.count_acc;
        if (agg.type_error) s["type_error"] = *agg.type_error;
        if (agg.axis_error_rad) s["axis_error_rad"] = *agg.axis_error_rad;
        if (agg.origin_error_m) s["origin_error_m"] = *agg.origin_error_m;
        if (!agg.failure_breakdown.empty()) {
            json fb = json::object();
            for (const auto& [category, fraction] : agg.failure_breakdown) fb[category] = fraction;
            s["failure_breakdown"] = std::move(fb);
        }
        doc["splits"][label] = std::move(s);
    }
    return doc;
}

inline std::string report_to_table(const EvalReport& report) {
    std::ostringstream out;
    auto cell = [&](const std::optional<double>& v) {
        if (!v) return std::string("-");
        std::ostringstream s;
        s << std::fixed << std::setprecision(4) << *v;
        return s.str();
    };
    out << std::left << std::setw(8) << "split" << std::right << std::setw(6) << "objs" << std::setw(10)
        << "exec" << std::setw(10) << "mIoU" << std::setw(10) << "count" << std::setw(10) << "type"
        << std::setw(10) << "axis" << std::setw(10) << "origin" << '\n';
    for (const auto& [label, agg] : report.splits) {
        out << std::left << std::setw(8) << label << std::right << std::setw(6) << agg.objects
            << std::setw(10) << cell(agg.executability_rate) << std::setw(10) << cell(agg.miou)
            << std::setw(10) << cell(agg.count_acc) << std::setw(10) << cell(agg.type_error)
            << std::setw(10) << cell(agg.axis_error_rad) << std::setw(10) << cell(agg.origin_error_m)
            << '\n';
    }
    for (const auto& [label, agg] : report.splits) {
        for (const auto& [category, fraction] : agg.failure_breakdown)
            out << label << " failure " << category << ": " << std::fixed << std::setprecision(4)
                << fraction << '\n';
    }
    return out.str();
}

}  // namespace artikit
