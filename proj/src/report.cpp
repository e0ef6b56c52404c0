#include "homoseg/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "homoseg/errors.hpp"

namespace homoseg {

namespace {

constexpr std::string_view kNameHeader = "Model Name";

std::string pad_right(std::string_view s, std::size_t width) {
    std::string out(s);
    if (out.size() < width) out.append(width - out.size(), ' ');
    return out;
}

std::string pad_left(std::string_view s, std::size_t width) {
    std::string out;
    if (s.size() < width) out.append(width - s.size(), ' ');
    out += s;
    return out;
}

double number_or_nan(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return v.get<double>();
}

}  // namespace

ReportRow ReportRow::from(std::string name, const MetricsReport& report) {
    return {std::move(name), report.accuracy, report.jaccard,  report.dice,
            report.roc_auc,  report.eer,      report.eer_threshold};
}

std::string format_metric(double value) {
    if (std::isnan(value)) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    return buf;
}

std::string format_row_values(const ReportRow& row) {
    std::string out;
    for (double v : row.values()) {
        if (!out.empty()) out += " / ";
        out += format_metric(v);
    }
    return out;
}

std::string format_table(const std::vector<ReportRow>& rows) {
    std::size_t name_width = kNameHeader.size();
    for (const auto& r : rows) name_width = std::max(name_width, r.name.size());

    std::ostringstream out;
    out << pad_right(kNameHeader, name_width);
    for (auto col : kMetricColumns) out << "  " << col;
    out << '\n';
    for (const auto& r : rows) {
        out << pad_right(r.name, name_width);
        const auto values = r.values();
        for (std::size_t c = 0; c < values.size(); ++c) {
            out << "  " << pad_left(format_metric(values[c]), kMetricColumns[c].size());
        }
        out << '\n';
    }
    return out.str();
}

nlohmann::json to_json(const MetricsReport& report) {
    auto num = [](double v) -> nlohmann::json {
        if (std::isnan(v)) return nullptr;
        return v;
    };
    nlohmann::json j;
    j["accuracy"] = num(report.accuracy);
    j["jaccard"] = num(report.jaccard);
    j["dice"] = num(report.dice);
    j["roc_auc"] = num(report.roc_auc);
    j["eer"] = num(report.eer);
    j["eer_threshold"] = num(report.eer_threshold);
    j["tp"] = report.counts.tp;
    j["tn"] = report.counts.tn;
    j["fp"] = report.counts.fp;
    j["fn"] = report.counts.fn;
    j["empty_positive_class"] = report.empty_positive_class;
    j["roc_defined"] = report.roc_defined;
    return j;
}

MetricsReport metrics_from_json(const nlohmann::json& j) {
    MetricsReport r;
    try {
        r.accuracy = number_or_nan(j, "accuracy");
        r.jaccard = number_or_nan(j, "jaccard");
        r.dice = number_or_nan(j, "dice");
        r.roc_auc = number_or_nan(j, "roc_auc");
        r.eer = number_or_nan(j, "eer");
        r.eer_threshold = number_or_nan(j, "eer_threshold");
        r.counts.tp = j.at("tp").get<std::uint64_t>();
        r.counts.tn = j.at("tn").get<std::uint64_t>();
        r.counts.fp = j.at("fp").get<std::uint64_t>();
        r.counts.fn = j.at("fn").get<std::uint64_t>();
        r.empty_positive_class = j.value("empty_positive_class", false);
        r.roc_defined = j.value("roc_defined", true);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed metrics JSON: ") + e.what());
    }
    return r;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write ROC CSV: " + path.string());
    out << "threshold,fpr,tpr\n";
    for (const auto& p : curve.points) {
        out << format_double(p.threshold) << ',' << format_double(p.fpr) << ','
            << format_double(p.tpr) << '\n';
    }
    if (!out) throw IoError("failed writing ROC CSV: " + path.string());
}

}  // namespace homoseg
