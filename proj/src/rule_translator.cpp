#include "geocmd/rule_translator.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace geocmd {

namespace {

#include "geocmd_default_rules.inc"

using json = nlohmann::json;

constexpr auto kRegexFlags = std::regex::ECMAScript | std::regex::icase;

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::optional<SlotKind> parse_slot_kind(std::string_view s) {
    if (s == "number") return SlotKind::Number;
    if (s == "integer") return SlotKind::Integer;
    if (s == "string") return SlotKind::String;
    if (s == "enum") return SlotKind::Enum;
    return std::nullopt;
}

std::regex compile(const std::string& pattern, const std::string& where) {
    try {
        return std::regex(pattern, kRegexFlags);
    } catch (const std::regex_error& e) {
        throw RuleError(where + ": invalid regex '" + pattern + "': " + e.what());
    }
}

// Placeholder names used by a call template, in order of appearance.
std::vector<std::string> placeholders(std::string_view tmpl, const std::string& where) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while ((i = tmpl.find('{', i)) != std::string_view::npos) {
        const auto close = tmpl.find('}', i);
        if (close == std::string_view::npos) throw RuleError(where + ": unterminated placeholder in call template");
        out.emplace_back(tmpl.substr(i + 1, close - i - 1));
        i = close + 1;
    }
    return out;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

} // namespace

struct RuleSet::Compiled {
    std::vector<std::regex> triggers;
    std::vector<std::vector<std::regex>> slot_patterns;
};

namespace {

// The slot's argument text as it appears in the call, or nullopt.
std::optional<std::string> render_slot(const RuleSlot& slot, std::string captured) {
    if (slot.lowercase) captured = lower(std::move(captured));
    switch (slot.kind) {
    case SlotKind::Number:
        if (!NumberLiteral::is_valid(captured)) return std::nullopt;
        return captured;
    case SlotKind::Integer:
        if (!all_digits(captured)) return std::nullopt;
        return captured;
    case SlotKind::String:
        if (captured.empty() || captured.find('\'') != std::string::npos) return std::nullopt;
        return "'" + captured + "'";
    case SlotKind::Enum: {
        const auto it = slot.map.find(lower(captured));
        if (it == slot.map.end()) return std::nullopt;
        return "'" + it->second + "'";
    }
    }
    return std::nullopt;
}

std::optional<std::string> extract_slot(const RuleSlot& slot, const std::vector<std::regex>& patterns,
                                        const std::string& query) {
    for (const std::regex& re : patterns) {
        std::size_t seen = 0;
        for (auto it = std::sregex_iterator(query.begin(), query.end(), re); it != std::sregex_iterator(); ++it) {
            if (seen++ != slot.occurrence) continue;
            const std::smatch& m = *it;
            const std::string captured = m.size() > 1 && m[1].matched ? m[1].str() : m[0].str();
            if (auto value = render_slot(slot, captured)) return value;
            break;
        }
    }
    return std::nullopt;
}

} // namespace

RuleSet RuleSet::from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw RuleError(std::string("rules file is not JSON: ") + e.what());
    }

    RuleSet set;
    auto compiled = std::make_shared<std::vector<Compiled>>();
    try {
        if (doc.at("format_version").get<int>() != kRulesFormatVersion)
            throw RuleError("unsupported rules format_version " + doc.at("format_version").dump());
        std::set<std::string> ids;
        for (const json& r : doc.at("rules")) {
            Rule rule;
            rule.id = r.at("id").get<std::string>();
            const std::string where = "rule '" + rule.id + "'";
            if (!ids.insert(rule.id).second) throw RuleError("duplicate " + where);
            rule.function = r.at("function").get<std::string>();
            if (!is_function_name(rule.function)) throw RuleError(where + ": unknown function " + rule.function);
            rule.priority = r.value("priority", 0);
            rule.triggers = r.at("triggers").get<std::vector<std::string>>();
            if (rule.triggers.empty()) throw RuleError(where + ": no triggers");
            rule.call = r.at("call").get<std::string>();
            if (rule.call.rfind(rule.function + "(", 0) != 0)
                throw RuleError(where + ": call template does not start with " + rule.function + "(");

            for (const json& s : r.at("slots")) {
                RuleSlot slot;
                slot.name = s.at("name").get<std::string>();
                const auto kind = parse_slot_kind(s.at("kind").get<std::string>());
                if (!kind) throw RuleError(where + ": unknown slot kind " + s.at("kind").dump());
                slot.kind = *kind;
                slot.patterns = s.at("patterns").get<std::vector<std::string>>();
                if (slot.patterns.empty()) throw RuleError(where + ": slot '" + slot.name + "' has no patterns");
                slot.occurrence = s.value("occurrence", std::size_t{0});
                slot.lowercase = s.value("lowercase", false);
                if (s.contains("map"))
                    for (const auto& [k, v] : s.at("map").items()) slot.map.emplace(lower(k), v.get<std::string>());
                if (slot.kind == SlotKind::Enum && slot.map.empty())
                    throw RuleError(where + ": enum slot '" + slot.name + "' has no map");
                rule.slots.push_back(std::move(slot));
            }
            for (const std::string& name : placeholders(rule.call, where))
                if (std::none_of(rule.slots.begin(), rule.slots.end(), [&](const RuleSlot& s) { return s.name == name; }))
                    throw RuleError(where + ": call template uses undeclared slot '" + name + "'");
            set.rules_.push_back(std::move(rule));
        }
    } catch (const json::exception& e) {
        throw RuleError(std::string("malformed rules file: ") + e.what());
    }

    std::stable_sort(set.rules_.begin(), set.rules_.end(),
                     [](const Rule& a, const Rule& b) { return a.priority > b.priority; });
    for (const Rule& rule : set.rules_) {
        const std::string where = "rule '" + rule.id + "'";
        Compiled c;
        for (const auto& t : rule.triggers) c.triggers.push_back(compile(t, where));
        for (const auto& slot : rule.slots) {
            std::vector<std::regex> patterns;
            for (const auto& p : slot.patterns) patterns.push_back(compile(p, where));
            c.slot_patterns.push_back(std::move(patterns));
        }
        compiled->push_back(std::move(c));
    }
    set.compiled_ = std::move(compiled);
    return set;
}

RuleSet RuleSet::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RuleError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return from_json(buf.str());
    } catch (const RuleError& e) {
        throw RuleError(path.string() + ": " + e.what());
    }
}

std::string_view RuleSet::builtin_text() { return kDefaultRulesJson; }

const RuleSet& RuleSet::builtin() {
    static const RuleSet set = from_json(kDefaultRulesJson);
    return set;
}

std::optional<RuleMatch> RuleSet::match(std::string_view query_view) const {
    const std::string query(query_view);
    for (std::size_t r = 0; r < rules_.size(); ++r) {
        const Rule& rule = rules_[r];
        const Compiled& c = (*compiled_)[r];
        if (std::none_of(c.triggers.begin(), c.triggers.end(),
                         [&](const std::regex& re) { return std::regex_search(query, re); }))
            continue;

        std::map<std::string, std::string> values;
        bool complete = true;
        for (std::size_t s = 0; s < rule.slots.size() && complete; ++s) {
            auto value = extract_slot(rule.slots[s], c.slot_patterns[s], query);
            if (value) values.emplace(rule.slots[s].name, std::move(*value));
            else complete = false;
        }
        if (!complete) continue;

        std::string text;
        std::size_t i = 0;
        while (i < rule.call.size()) {
            if (rule.call[i] == '{') {
                const auto close = rule.call.find('}', i);
                text += values.at(rule.call.substr(i + 1, close - i - 1));
                i = close + 1;
            } else {
                text += rule.call[i++];
            }
        }
        if (auto call = try_parse_call(text)) return RuleMatch{rule.id, std::move(*call)};
    }
    return std::nullopt;
}

std::optional<GisCall> RuleSet::translate(std::string_view query) const {
    auto m = match(query);
    if (!m) return std::nullopt;
    return std::move(m->call);
}

std::optional<GisCall> translate_rules(std::string_view query) { return RuleSet::builtin().translate(query); }

} // namespace geocmd
