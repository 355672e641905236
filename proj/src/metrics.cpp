#include "evkws/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "evkws/error.hpp"

namespace evkws {
namespace {

void require_nonempty(std::span<const EvalRecord> records) {
    if (records.empty()) throw ValidationError("metrics need at least one record");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view field, std::uint64_t line) {
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError("line " + std::to_string(line) + ": bad number '" + std::string(field) + "'", line);
    }
    return value;
}

}  // namespace

double accuracy(std::span<const EvalRecord> records) {
    require_nonempty(records);
    std::uint64_t hits = 0;
    for (const auto& r : records) hits += r.pred_class == r.true_class;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(records.size());
}

double ts_accuracy(std::span<const EvalRecord> records, std::int64_t k) {
    require_nonempty(records);
    if (k < 0) throw ValidationError("ts_accuracy tolerance must be >= 0");
    std::uint64_t hits = 0;
    for (const auto& r : records) {
        if (r.pred_class != r.true_class || !r.true_bin) continue;
        const std::int64_t d = r.pred_bin - *r.true_bin;
        hits += (d < 0 ? -d : d) <= k;
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(records.size());
}

F1Result macro_f1(std::span<const EvalRecord> records) {
    require_nonempty(records);
    std::map<int, std::uint64_t> tp, predicted, support;
    std::set<int> classes;
    for (const auto& r : records) {
        ++support[r.true_class];
        ++predicted[r.pred_class];
        if (r.pred_class == r.true_class) ++tp[r.true_class];
        classes.insert(r.true_class);
        classes.insert(r.pred_class);
    }
    F1Result out;
    double sum = 0.0;
    std::size_t present = 0;
    for (int c : classes) {
        const double t = static_cast<double>(tp[c]);
        const double pc = static_cast<double>(predicted[c]);
        const double sc = static_cast<double>(support[c]);
        // A class that is never predicted has zero precision.
        const double prec = pc > 0 ? t / pc : 0.0;
        const double rec = sc > 0 ? t / sc : 0.0;
        const double f1 = 2.0 * prec * rec / (prec + rec + kF1Epsilon);
        out.per_class[c] = 100.0 * f1;
        if (support[c] > 0) {
            out.support[c] = support[c];
            sum += f1;
            ++present;
        }
    }
    out.macro = 100.0 * sum / static_cast<double>(present);
    return out;
}

MetricReport evaluate(std::span<const EvalRecord> records, std::span<const std::int64_t> ks) {
    static constexpr std::int64_t kDefaultKs[] = {1, 3};
    if (ks.empty()) ks = kDefaultKs;
    MetricReport r;
    r.n = records.size();
    r.acc = accuracy(records);
    for (auto k : ks) r.ts_acc[k] = ts_accuracy(records, k);
    const auto f1 = macro_f1(records);
    r.f1_macro = f1.macro;
    r.per_class_f1 = f1.per_class;
    r.support = f1.support;
    for (const auto& rec : records) r.missing_true_bin += !rec.true_bin;

    // ts_acc is bounded by acc and non-decreasing in k by construction.
    double prev = -1.0;
    for (const auto& [k, v] : r.ts_acc) {
        if (v > r.acc + 1e-9 || v + 1e-9 < prev) throw Error("internal: ts_acc ordering violated");
        prev = v;
    }
    return r;
}

nlohmann::json to_json(const MetricReport& r) {
    nlohmann::json ts = nlohmann::json::object();
    for (const auto& [k, v] : r.ts_acc) ts[std::to_string(k)] = v;
    nlohmann::json per_class = nlohmann::json::object();
    for (const auto& [c, v] : r.per_class_f1) per_class[std::to_string(c)] = v;
    nlohmann::json support = nlohmann::json::object();
    for (const auto& [c, v] : r.support) support[std::to_string(c)] = v;
    return {{"n", r.n},
            {"acc", r.acc},
            {"ts_acc", ts},
            {"f1_macro", r.f1_macro},
            {"per_class", per_class},
            {"support", support},
            {"meta",
             {{"bin_ms", 10},
              {"f1_epsilon", kF1Epsilon},
              {"missing_true_bin", r.missing_true_bin},
              {"missing_true_bin_policy", "counted in ts_acc denominators, never localized"}}}};
}

std::vector<EvalRecord> parse_eval_records_csv(std::string_view text) {
    std::vector<EvalRecord> out;
    std::uint64_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || (line_no == 1 && line.starts_with("sample_id"))) continue;
        const auto f = split(line, ',');
        if (f.size() != 5) throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields", line_no);
        EvalRecord r;
        r.sample_id = std::string(f[0]);
        r.true_class = parse_number<int>(f[1], line_no);
        if (!f[2].empty()) r.true_bin = parse_number<std::int64_t>(f[2], line_no);
        r.pred_class = parse_number<int>(f[3], line_no);
        r.pred_bin = parse_number<std::int64_t>(f[4], line_no);
        if ((r.true_bin && *r.true_bin < 0) || r.pred_bin < 0) {
            throw ValidationError("line " + std::to_string(line_no) + ": bins must be >= 0");
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<EvalRecord> parse_eval_records_jsonl(std::string_view text) {
    std::vector<EvalRecord> out;
    std::uint64_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            EvalRecord r;
            r.sample_id = j.value("sample_id", std::string{});
            r.true_class = j.at("y").get<int>();
            if (j.contains("t") && !j.at("t").is_null()) r.true_bin = j.at("t").get<std::int64_t>();
            r.pred_class = j.at("y_hat").get<int>();
            r.pred_bin = j.at("t_hat").get<std::int64_t>();
            if ((r.true_bin && *r.true_bin < 0) || r.pred_bin < 0) {
                throw ValidationError("line " + std::to_string(line_no) + ": bins must be >= 0");
            }
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
    }
    return out;
}

EventRateReport event_rate_report(std::span<const EventStream> pre, std::span<const EventStream> post,
                                  std::uint32_t window_us) {
    EventRateReport r;
    r.pre = compute_stats(pre, window_us);
    if (post.empty()) return r;
    if (post.size() != pre.size()) throw ValidationError("event_rate_report: pre/post sample counts differ");
    for (std::size_t i = 0; i < pre.size(); ++i) {
        if (pre[i].sample_id != post[i].sample_id) {
            throw ValidationError("event_rate_report: sample '" + pre[i].sample_id + "' has no matching post sample");
        }
    }
    r.post = compute_stats(post, window_us);
    if (r.pre.total_events > 0) {
        r.reduction_pct = 100.0 * (1.0 - static_cast<double>(r.post->total_events) /
                                             static_cast<double>(r.pre.total_events));
    }
    return r;
}

nlohmann::json to_json(const EventRateReport& r) {
    nlohmann::json j = {{"pre", to_json(r.pre)}};
    if (r.post) j["post"] = to_json(*r.post);
    j["reduction_pct"] = r.reduction_pct ? nlohmann::json(*r.reduction_pct) : nlohmann::json(nullptr);
    return j;
}

}  // namespace evkws
