#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "homoseg/metrics.hpp"

namespace homoseg {

/// One line of the model comparison table.
struct ReportRow {
    std::string name;
    double accuracy = 0.0;
    double jaccard = 0.0;
    double dice = 0.0;
    double roc_auc = 0.0;
    double eer = 0.0;
    double eer_threshold = 0.0;

    static ReportRow from(std::string name, const MetricsReport& report);
    std::array<double, 6> values() const {
        return {accuracy, jaccard, dice, roc_auc, eer, eer_threshold};
    }
};

/// Column headers in table order, excluding the model name column.
inline constexpr std::array<std::string_view, 6> kMetricColumns = {
    "Accuracy", "Jaccard", "Dice", "ROC AUC", "EER", "EER Threshold"};

/// Two-decimal rendering; "n/a" for NaN.
std::string format_metric(double value);

/// "0.90 / 0.67 / 0.80 / 0.91 / 0.17 / 0.74"
std::string format_row_values(const ReportRow& row);

/// Aligned plain-text table, header first, one line per row.
std::string format_table(const std::vector<ReportRow>& rows);

nlohmann::json to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const nlohmann::json& j);

/// `threshold,fpr,tpr` with full round-trip precision.
void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace homoseg
