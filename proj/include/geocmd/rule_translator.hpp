#pragma once

// Pattern-based translator. The rules are data: a JSON file of records
//
//   {"id", "function", "priority", "triggers": [regex...],
//    "slots": [{"name", "kind", "patterns": [regex...], "occurrence"?, "map"?, "lowercase"?}],
//    "call": "Function({slot}, ...)"}
//
// Rules are tried by descending priority (file order among equals). A rule
// fires when any trigger matches; every slot must then extract a value from
// its first matching pattern, and the rendered call must parse. Otherwise the
// next rule is tried. All regexes are ECMAScript, case-insensitive.
//
// Slot kinds: number (verbatim decimal), integer, string (single-quoted in the
// call), enum (captured text lowercased and looked up in "map", quoted).

#include "geocmd/command_model.hpp"
#include "geocmd/error.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace geocmd {

inline constexpr int kRulesFormatVersion = 1;

class RuleError : public Error {
public:
    explicit RuleError(const std::string& message) : Error("InvalidRules", message) {}
};

enum class SlotKind { Number, Integer, String, Enum };

struct RuleSlot {
    std::string name;
    SlotKind kind = SlotKind::String;
    std::vector<std::string> patterns;
    std::size_t occurrence = 0;
    std::map<std::string, std::string> map;
    bool lowercase = false;
};

struct Rule {
    std::string id;
    std::string function;
    int priority = 0;
    std::vector<std::string> triggers;
    std::vector<RuleSlot> slots;
    std::string call;
};

struct RuleMatch {
    std::string rule_id;
    GisCall call;
};

class RuleSet {
public:
    // Throws RuleError on malformed JSON, unknown function or slot kind,
    // invalid regex, or a call template naming an undeclared slot.
    static RuleSet from_json(std::string_view text);
    static RuleSet load(const std::filesystem::path& path);

    // The rules shipped in rules/default_rules.json, compiled into the library.
    static const RuleSet& builtin();
    static std::string_view builtin_text();

    // Rules in evaluation order.
    const std::vector<Rule>& rules() const noexcept { return rules_; }

    std::optional<RuleMatch> match(std::string_view query) const;
    std::optional<GisCall> translate(std::string_view query) const;

private:
    struct Compiled;

    std::vector<Rule> rules_;
    std::shared_ptr<const std::vector<Compiled>> compiled_;
};

// Built-in rules. std::nullopt is NoMatch.
std::optional<GisCall> translate_rules(std::string_view query);

} // namespace geocmd
