#include "geocmd/command_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <vector>

namespace geocmd {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

// Length of the longest decimal literal prefix of text, 0 if none.
std::size_t scan_number(std::string_view text) {
    std::size_t i = 0;
    if (i < text.size() && text[i] == '-') ++i;
    const std::size_t int_start = i;
    while (i < text.size() && is_digit(text[i])) ++i;
    if (i == int_start) return 0;
    if (i + 1 < text.size() && text[i] == '.' && is_digit(text[i + 1])) {
        ++i;
        while (i < text.size() && is_digit(text[i])) ++i;
    }
    return i;
}

struct RawArg {
    enum class Kind { String, Number, Null, Pair };
    Kind kind = Kind::String;
    std::string text;
    std::array<std::string, 2> pair;
    std::size_t position = 0;
};

std::string_view kind_name(RawArg::Kind kind) {
    switch (kind) {
    case RawArg::Kind::String: return "string";
    case RawArg::Kind::Number: return "number";
    case RawArg::Kind::Null: return "null";
    case RawArg::Kind::Pair: return "coordinate pair";
    }
    return "?";
}

class CallLexer {
public:
    explicit CallLexer(std::string_view text) : text_(text) {}

    std::string_view name() const { return name_; }
    std::size_t name_position() const { return name_pos_; }
    const std::vector<RawArg>& args() const { return args_; }

    void run() {
        skip_space();
        name_pos_ = pos_;
        if (pos_ >= text_.size() || !is_ident_start(text_[pos_]))
            fail("expected function name");
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        name_ = text_.substr(name_pos_, pos_ - name_pos_);
        expect('(');
        skip_space();
        if (peek() == ')') {
            ++pos_;
        } else {
            for (;;) {
                args_.push_back(argument());
                skip_space();
                if (peek() == ',') {
                    ++pos_;
                    skip_space();
                    continue;
                }
                if (peek() == ')') {
                    ++pos_;
                    break;
                }
                fail("expected ',' or ')'");
            }
        }
        skip_space();
        if (pos_ != text_.size()) fail("trailing characters after ')'");
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(ParseErrorKind::SyntaxError, pos_, what);
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_space() {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string number() {
        const std::size_t len = scan_number(text_.substr(pos_));
        if (len == 0) fail("malformed number");
        const std::size_t end = pos_ + len;
        if (end < text_.size() && (is_ident_char(text_[end]) || text_[end] == '.'))
            fail("malformed number");
        std::string out(text_.substr(pos_, len));
        pos_ = end;
        return out;
    }

    RawArg argument() {
        RawArg arg;
        arg.position = pos_;
        const char c = peek();
        if (c == '\'') {
            const std::size_t close = text_.find('\'', pos_ + 1);
            if (close == std::string_view::npos) fail("unterminated string literal");
            arg.kind = RawArg::Kind::String;
            arg.text = std::string(text_.substr(pos_ + 1, close - pos_ - 1));
            pos_ = close + 1;
        } else if (c == '[') {
            ++pos_;
            skip_space();
            arg.kind = RawArg::Kind::Pair;
            arg.pair[0] = number();
            skip_space();
            expect(',');
            skip_space();
            arg.pair[1] = number();
            skip_space();
            expect(']');
        } else if (c == '-' || is_digit(c)) {
            arg.kind = RawArg::Kind::Number;
            arg.text = number();
        } else if (is_ident_start(c)) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
            if (text_.substr(start, pos_ - start) != "null") {
                pos_ = start;
                fail("bare word is not a valid argument");
            }
            arg.kind = RawArg::Kind::Null;
        } else {
            fail("expected an argument");
        }
        return arg;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::string_view name_;
    std::size_t name_pos_ = 0;
    std::vector<RawArg> args_;
};

[[noreturn]] void type_mismatch(const RawArg& arg, const std::string& what) {
    throw ParseError(ParseErrorKind::TypeMismatch, arg.position, what);
}

const std::string& want_string(const RawArg& arg) {
    if (arg.kind != RawArg::Kind::String)
        type_mismatch(arg, "expected string, got " + std::string(kind_name(arg.kind)));
    return arg.text;
}

NumberLiteral want_number(const RawArg& arg) {
    if (arg.kind != RawArg::Kind::Number)
        type_mismatch(arg, "expected number, got " + std::string(kind_name(arg.kind)));
    return NumberLiteral(arg.text);
}

std::uint32_t want_levels(const RawArg& arg) {
    if (arg.kind != RawArg::Kind::Number)
        type_mismatch(arg, "expected zoom levels, got " + std::string(kind_name(arg.kind)));
    const std::string& t = arg.text;
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size())
        type_mismatch(arg, "zoom levels must be a positive integer");
    if (value < 1) type_mismatch(arg, "zoom levels must be >= 1");
    return value;
}

template <class Enum>
Enum want_enum(const RawArg& arg, std::optional<Enum> (*lookup)(std::string_view) noexcept,
               std::string_view what) {
    const std::string& text = want_string(arg);
    const auto value = lookup(text);
    if (!value) type_mismatch(arg, "unknown " + std::string(what) + " '" + text + "'");
    return *value;
}

void append_quoted(std::string& out, std::string_view s) {
    out += '\'';
    out += s;
    out += '\'';
}

} // namespace

NumberLiteral::NumberLiteral(std::string text) : text_(std::move(text)) {
    if (!is_valid(text_))
        throw ParseError(ParseErrorKind::TypeMismatch, 0, "invalid number literal '" + text_ + "'");
}

bool NumberLiteral::is_valid(std::string_view text) noexcept {
    return !text.empty() && scan_number(text) == text.size();
}

double NumberLiteral::value() const { return std::strtod(text_.c_str(), nullptr); }

bool is_function_name(std::string_view name) noexcept {
    return std::find(kFunctionNames.begin(), kFunctionNames.end(), name) != kFunctionNames.end();
}

std::string_view to_string(ParseErrorKind kind) noexcept {
    switch (kind) {
    case ParseErrorKind::UnknownFunction: return "UnknownFunction";
    case ParseErrorKind::ArityMismatch: return "ArityMismatch";
    case ParseErrorKind::TypeMismatch: return "TypeMismatch";
    case ParseErrorKind::SyntaxError: return "SyntaxError";
    }
    return "ParseError";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t position, const std::string& detail)
    : Error(std::string(to_string(kind)),
            std::string(to_string(kind)) + " at offset " + std::to_string(position) + ": " + detail),
      kind_(kind), position_(position) {}

GisCall parse_call(std::string_view text) {
    CallLexer lexer(text);
    lexer.run();

    const std::string_view name = lexer.name();
    const auto& args = lexer.args();
    const auto it = std::find(kFunctionNames.begin(), kFunctionNames.end(), name);
    if (it == kFunctionNames.end())
        throw ParseError(ParseErrorKind::UnknownFunction, lexer.name_position(),
                         "unknown function '" + std::string(name) + "'");

    static constexpr std::array<std::size_t, 10> kArity = {2, 1, 2, 1, 3, 1, 2, 4, 1, 1};
    const auto index = static_cast<std::size_t>(it - kFunctionNames.begin());
    if (args.size() != kArity[index])
        throw ParseError(ParseErrorKind::ArityMismatch, lexer.name_position(),
                         std::string(name) + " takes " + std::to_string(kArity[index]) +
                             " argument(s), got " + std::to_string(args.size()));

    switch (index) {
    case 0: {
        AddMarker call{want_string(args[0]), {}};
        if (args[1].kind != RawArg::Kind::Pair)
            type_mismatch(args[1], "expected coordinate pair, got " +
                                       std::string(kind_name(args[1].kind)));
        call.coords = {NumberLiteral(args[1].pair[0]), NumberLiteral(args[1].pair[1])};
        return call;
    }
    case 1: return AddLayer{want_string(args[0])};
    case 2:
        return AddVector{want_enum<GeometryKind>(args[0], parse_geometry_kind, "geometry kind"),
                         want_string(args[1])};
    case 3: return AddWMS{want_string(args[0])};
    case 4: {
        Cartography call{want_enum<CartoProperty>(args[0], parse_carto_property, "property"),
                         want_string(args[1]), std::nullopt};
        if (args[2].kind != RawArg::Kind::Null) call.extra = want_string(args[2]);
        return call;
    }
    case 5: return Draw{want_enum<DrawShape>(args[0], parse_draw_shape, "draw shape")};
    case 6: return Move{want_number(args[0]), want_number(args[1])};
    case 7:
        return MoveToExtent{{want_number(args[0]), want_number(args[1]), want_number(args[2]),
                             want_number(args[3])}};
    case 8: return ZoomIn{want_levels(args[0])};
    default: return ZoomOut{want_levels(args[0])};
    }
}

std::optional<GisCall> try_parse_call(std::string_view text, ParseErrorKind* error) {
    try {
        return parse_call(text);
    } catch (const ParseError& e) {
        if (error) *error = e.kind();
        return std::nullopt;
    }
}

std::string serialize_call(const GisCall& call) {
    std::string out(function_name(call));
    out += '(';
    std::visit(
        [&out](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, AddMarker>) {
                append_quoted(out, c.label);
                out += ", [" + c.coords[0].text() + ", " + c.coords[1].text() + "]";
            } else if constexpr (std::is_same_v<T, AddLayer>) {
                append_quoted(out, c.name);
            } else if constexpr (std::is_same_v<T, AddVector>) {
                append_quoted(out, to_string(c.geometry));
                out += ", ";
                append_quoted(out, c.filename);
            } else if constexpr (std::is_same_v<T, AddWMS>) {
                append_quoted(out, c.url);
            } else if constexpr (std::is_same_v<T, Cartography>) {
                append_quoted(out, to_string(c.property));
                out += ", ";
                append_quoted(out, c.color);
                out += ", ";
                if (c.extra) append_quoted(out, *c.extra);
                else out += "null";
            } else if constexpr (std::is_same_v<T, Draw>) {
                append_quoted(out, to_string(c.shape));
            } else if constexpr (std::is_same_v<T, Move>) {
                out += c.a.text() + ", " + c.b.text();
            } else if constexpr (std::is_same_v<T, MoveToExtent>) {
                for (std::size_t i = 0; i < c.bounds.size(); ++i) {
                    if (i) out += ", ";
                    out += c.bounds[i].text();
                }
            } else {
                out += std::to_string(c.levels);
            }
        },
        call);
    out += ')';
    return out;
}

std::string_view function_name(const GisCall& call) noexcept {
    return kFunctionNames[call.index()];
}

std::string_view to_string(GeometryKind kind) noexcept {
    switch (kind) {
    case GeometryKind::Point: return "point";
    case GeometryKind::Line: return "line";
    case GeometryKind::Polyline: return "polyline";
    case GeometryKind::Polygon: return "polygon";
    }
    return "point";
}

std::string_view to_string(DrawShape shape) noexcept {
    switch (shape) {
    case DrawShape::Point: return "Point";
    case DrawShape::Line: return "Line";
    case DrawShape::Polygon: return "Polygon";
    }
    return "Point";
}

std::string_view to_string(CartoProperty property) noexcept {
    switch (property) {
    case CartoProperty::Background: return "background";
    case CartoProperty::Fill: return "fill";
    case CartoProperty::Stroke: return "stroke";
    }
    return "background";
}

std::optional<GeometryKind> parse_geometry_kind(std::string_view text) noexcept {
    for (auto k : {GeometryKind::Point, GeometryKind::Line, GeometryKind::Polyline, GeometryKind::Polygon})
        if (iequals(text, to_string(k))) return k;
    return std::nullopt;
}

std::optional<DrawShape> parse_draw_shape(std::string_view text) noexcept {
    for (auto s : {DrawShape::Point, DrawShape::Line, DrawShape::Polygon})
        if (iequals(text, to_string(s))) return s;
    return std::nullopt;
}

std::optional<CartoProperty> parse_carto_property(std::string_view text) noexcept {
    for (auto p : {CartoProperty::Background, CartoProperty::Fill, CartoProperty::Stroke})
        if (iequals(text, to_string(p))) return p;
    return std::nullopt;
}

} // namespace geocmd
