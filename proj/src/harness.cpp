#include "geocmd/harness.hpp"

#include "geocmd/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <set>

namespace geocmd {

namespace {

constexpr std::string_view kCsvHeader = "system,kind,n,ema,ls,rouge1,rougeL,precision,recall,f1,accuracy";
constexpr std::string_view kAbsent = "-";

std::string_view code_of(HarnessErrorKind kind) {
    switch (kind) {
    case HarnessErrorKind::MixedKinds: return "MixedKinds";
    case HarnessErrorKind::EmptySystem: return "EmptySystem";
    case HarnessErrorKind::DuplicateId: return "DuplicateId";
    case HarnessErrorKind::MalformedReport: return "MalformedReport";
    }
    return "HarnessError";
}

std::string shortest(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string csv_cell(const std::optional<double>& v) { return v ? shortest(*v) : std::string(kAbsent); }

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> csv_fields(std::string_view line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back();
        } else {
            out.back() += c;
        }
    }
    if (quoted) throw HarnessError(HarnessErrorKind::MalformedReport, "unterminated quote in report row");
    return out;
}

std::optional<double> parse_cell(const std::string& s) {
    if (s == kAbsent) return std::nullopt;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
        throw HarnessError(HarnessErrorKind::MalformedReport, "bad metric value '" + s + "'");
    return v;
}

std::string fixed(const std::optional<double>& v) {
    if (!v) return std::string(kAbsent);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

double mean(const std::vector<double>& xs) {
    double sum = 0.0;
    for (const double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

} // namespace

HarnessError::HarnessError(HarnessErrorKind kind, const std::string& message)
    : Error(std::string(code_of(kind)), message), kind_(kind) {}

std::vector<PredictionRecord> predict_classifier(const AnyModel& model, const std::vector<Sample>& samples,
                                                 const std::string& system) {
    std::vector<PredictionRecord> out;
    out.reserve(samples.size());
    for (const Sample& s : samples) {
        PredictionRecord r;
        r.id = s.id;
        r.system = system;
        r.kind = PredictionKind::Classification;
        r.query = s.query;
        r.reference = s.function;
        r.prediction = predict_label(model, s.query);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<PredictionRecord> predict_rules(const RuleSet& rules, const std::vector<Sample>& samples,
                                            const std::string& system) {
    std::vector<PredictionRecord> out;
    out.reserve(samples.size());
    for (const Sample& s : samples) {
        PredictionRecord r;
        r.id = s.id;
        r.system = system;
        r.kind = PredictionKind::Generation;
        r.query = s.query;
        r.reference = s.call;
        if (auto call = rules.translate(s.query)) {
            r.prediction = serialize_call(*call);
        } else {
            r.failed = true;
            r.error = "NoMatch";
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<MetricReport> evaluate(const std::vector<PredictionRecord>& records) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<const PredictionRecord*>> by_system;
    for (const PredictionRecord& r : records) {
        if (r.system.empty()) throw HarnessError(HarnessErrorKind::EmptySystem, "record " + std::to_string(r.id) + " has no system");
        auto [it, inserted] = by_system.try_emplace(r.system);
        if (inserted) order.push_back(r.system);
        it->second.push_back(&r);
    }

    const std::vector<std::string> classes(kFunctionNames.begin(), kFunctionNames.end());
    std::vector<MetricReport> out;
    for (const std::string& system : order) {
        auto& group = by_system[system];
        std::stable_sort(group.begin(), group.end(), [](auto* a, auto* b) { return a->id < b->id; });
        for (std::size_t i = 1; i < group.size(); ++i)
            if (group[i]->id == group[i - 1]->id)
                throw HarnessError(HarnessErrorKind::DuplicateId,
                                   "system '" + system + "' has two records with id " + std::to_string(group[i]->id));
        const PredictionKind kind = group.front()->kind;
        for (const auto* r : group)
            if (r->kind != kind)
                throw HarnessError(HarnessErrorKind::MixedKinds, "system '" + system + "' mixes generation and classification records");

        std::vector<StringPair> pairs;
        pairs.reserve(group.size());
        for (const auto* r : group) pairs.emplace_back(r->reference, r->failed ? std::string() : r->prediction);

        MetricReport rep;
        rep.system = system;
        rep.kind = kind;
        rep.n = group.size();
        if (kind == PredictionKind::Generation) {
            std::vector<double> ls, r1, rl;
            for (const auto& [ref, pred] : pairs) {
                ls.push_back(levenshtein_similarity(ref, pred));
                r1.push_back(rouge1(ref, pred));
                rl.push_back(rougeL(ref, pred));
            }
            rep.ema = exact_match_accuracy(pairs);
            rep.ls = mean(ls);
            rep.rouge1 = mean(r1);
            rep.rougeL = mean(rl);
        } else {
            const ClassificationReport c = classification_report(pairs, classes);
            rep.precision = c.macro_precision;
            rep.recall = c.macro_recall;
            rep.f1 = c.macro_f1;
            rep.accuracy = c.accuracy;
        }
        out.push_back(std::move(rep));
    }
    return out;
}

std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept {
    if (text == "csv") return ReportFormat::Csv;
    if (text == "md" || text == "markdown") return ReportFormat::Markdown;
    return std::nullopt;
}

std::string report_csv(const std::vector<MetricReport>& reports) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const MetricReport& r : reports) {
        out += csv_quote(r.system);
        out += ',';
        out += to_string(r.kind);
        out += ',' + std::to_string(r.n);
        for (const auto* v : {&r.ema, &r.ls, &r.rouge1, &r.rougeL, &r.precision, &r.recall, &r.f1, &r.accuracy})
            out += ',' + csv_cell(*v);
        out += '\n';
    }
    return out;
}

std::string report_markdown(const std::vector<MetricReport>& reports) {
    std::string out =
        "| System | Type | N | EMA | LS | ROUGE-1 | ROUGE-L | Precision | Recall | F1 Score | Accuracy |\n"
        "|---|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const MetricReport& r : reports) {
        std::string system = r.system;
        std::string::size_type pos = 0;
        while ((pos = system.find('|', pos)) != std::string::npos) {
            system.replace(pos, 1, "\\|");
            pos += 2;
        }
        out += "| " + system + " | ";
        out += r.kind == PredictionKind::Generation ? "Generation" : "Classification";
        out += " | " + std::to_string(r.n);
        for (const auto* v : {&r.ema, &r.ls, &r.rouge1, &r.rougeL, &r.precision, &r.recall, &r.f1, &r.accuracy})
            out += " | " + fixed(*v);
        out += " |\n";
    }
    out += "\nPrecision, recall and F1 are macro averages over the ten function labels. "
           "\"-\" marks a metric that does not apply to the system type.\n";
    return out;
}

std::string render_report(const std::vector<MetricReport>& reports, ReportFormat format) {
    return format == ReportFormat::Csv ? report_csv(reports) : report_markdown(reports);
}

std::vector<MetricReport> parse_report_csv(std::string_view text) {
    std::vector<MetricReport> out;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kCsvHeader)
                throw HarnessError(HarnessErrorKind::MalformedReport, "unexpected report header: " + std::string(line));
            header_seen = true;
            continue;
        }
        const auto f = csv_fields(line);
        const std::string where = "report line " + std::to_string(line_no);
        if (f.size() != 11) throw HarnessError(HarnessErrorKind::MalformedReport, where + ": expected 11 fields");
        MetricReport r;
        r.system = f[0];
        const auto kind = parse_prediction_kind(f[1]);
        if (!kind) throw HarnessError(HarnessErrorKind::MalformedReport, where + ": unknown kind '" + f[1] + "'");
        r.kind = *kind;
        const auto [end, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), r.n);
        if (ec != std::errc() || end != f[2].data() + f[2].size())
            throw HarnessError(HarnessErrorKind::MalformedReport, where + ": bad count '" + f[2] + "'");
        try {
            r.ema = parse_cell(f[3]);
            r.ls = parse_cell(f[4]);
            r.rouge1 = parse_cell(f[5]);
            r.rougeL = parse_cell(f[6]);
            r.precision = parse_cell(f[7]);
            r.recall = parse_cell(f[8]);
            r.f1 = parse_cell(f[9]);
            r.accuracy = parse_cell(f[10]);
        } catch (const HarnessError& e) {
            throw HarnessError(HarnessErrorKind::MalformedReport, where + ": " + e.what());
        }
        out.push_back(std::move(r));
    }
    if (!header_seen) throw HarnessError(HarnessErrorKind::MalformedReport, "empty report");
    return out;
}

} // namespace geocmd
