#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evkws/event.hpp"
#include "evkws/stats.hpp"

namespace evkws {

struct EvalRecord {
    std::string sample_id;
    int true_class = 0;
    std::optional<std::int64_t> true_bin;  // 10 ms bins; absent when the sample has no end-of-word label
    int pred_class = -1;
    std::int64_t pred_bin = 0;
};

inline constexpr double kF1Epsilon = 1e-12;

// Percentages. All throw ValidationError on an empty record set.
double accuracy(std::span<const EvalRecord> records);
// Records without a ground-truth bin stay in the denominator and never count as localized.
double ts_accuracy(std::span<const EvalRecord> records, std::int64_t k);

struct F1Result {
    double macro = 0.0;
    std::map<int, double> per_class;    // percent, every class seen in truth or predictions
    std::map<int, std::uint64_t> support;
};
// Averages F1 over classes with ground-truth support only.
F1Result macro_f1(std::span<const EvalRecord> records);

struct MetricReport {
    std::uint64_t n = 0;
    double acc = 0.0;
    std::map<std::int64_t, double> ts_acc;
    double f1_macro = 0.0;
    std::map<int, double> per_class_f1;
    std::map<int, std::uint64_t> support;
    std::uint64_t missing_true_bin = 0;
};

MetricReport evaluate(std::span<const EvalRecord> records, std::span<const std::int64_t> ks = {});
nlohmann::json to_json(const MetricReport& report);

// JSON lines {sample_id, y, t, y_hat, t_hat} or CSV "sample_id,y,t,y_hat,t_hat"
// (empty t means no ground-truth bin).
std::vector<EvalRecord> parse_eval_records_csv(std::string_view text);
std::vector<EvalRecord> parse_eval_records_jsonl(std::string_view text);

struct EventRateReport {
    StreamStats pre;
    std::optional<StreamStats> post;
    std::optional<double> reduction_pct;  // null when the input has no events
};

// Throws ValidationError when pre and post differ in sample count or ids.
EventRateReport event_rate_report(std::span<const EventStream> pre, std::span<const EventStream> post = {},
                                  std::uint32_t window_us = kWindowUs);
nlohmann::json to_json(const EventRateReport& report);

}  // namespace evkws
