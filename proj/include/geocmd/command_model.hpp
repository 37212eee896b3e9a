#pragma once

// The GIS function-call grammar: ten call variants, a parser for the
// canonical call-string form and the matching serializer.
//
// Canonical form:  Name(arg1, arg2, ...)
//   - string arguments are single-quoted, no escape mechanism
//   - numbers are kept as written (-?[0-9]+(\.[0-9]+)?)
//   - coordinate pairs are written [n1, n2]
//   - the only null argument is Cartography's third one

#include "geocmd/error.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace geocmd {

// A numeric argument. The text is authoritative: serialization writes it back
// verbatim so exact-match scoring never sees a re-formatted float.
class NumberLiteral {
public:
    NumberLiteral() : text_("0") {}

    // Throws ParseError(TypeMismatch) if text is not a decimal literal.
    explicit NumberLiteral(std::string text);

    static bool is_valid(std::string_view text) noexcept;

    const std::string& text() const noexcept { return text_; }
    double value() const;

    friend bool operator==(const NumberLiteral&, const NumberLiteral&) = default;

private:
    std::string text_;
};

enum class GeometryKind { Point, Line, Polyline, Polygon };
enum class DrawShape { Point, Line, Polygon };
enum class CartoProperty { Background, Fill, Stroke };

struct AddMarker {
    std::string label;
    std::array<NumberLiteral, 2> coords;
    friend bool operator==(const AddMarker&, const AddMarker&) = default;
};

struct AddLayer {
    std::string name;
    friend bool operator==(const AddLayer&, const AddLayer&) = default;
};

struct AddVector {
    GeometryKind geometry = GeometryKind::Point;
    std::string filename;
    friend bool operator==(const AddVector&, const AddVector&) = default;
};

struct AddWMS {
    std::string url;
    friend bool operator==(const AddWMS&, const AddWMS&) = default;
};

struct Cartography {
    CartoProperty property = CartoProperty::Background;
    std::string color;
    std::optional<std::string> extra;
    friend bool operator==(const Cartography&, const Cartography&) = default;
};

struct Draw {
    DrawShape shape = DrawShape::Point;
    friend bool operator==(const Draw&, const Draw&) = default;
};

struct Move {
    NumberLiteral a;
    NumberLiteral b;
    friend bool operator==(const Move&, const Move&) = default;
};

struct MoveToExtent {
    std::array<NumberLiteral, 4> bounds;
    friend bool operator==(const MoveToExtent&, const MoveToExtent&) = default;
};

struct ZoomIn {
    std::uint32_t levels = 1;
    friend bool operator==(const ZoomIn&, const ZoomIn&) = default;
};

struct ZoomOut {
    std::uint32_t levels = 1;
    friend bool operator==(const ZoomOut&, const ZoomOut&) = default;
};

using GisCall = std::variant<AddMarker, AddLayer, AddVector, AddWMS, Cartography,
                             Draw, Move, MoveToExtent, ZoomIn, ZoomOut>;

// The ten function names in declaration order (also the classifier labels).
inline constexpr std::array<std::string_view, 10> kFunctionNames = {
    "AddMarker", "AddLayer", "AddVector", "AddWMS", "Cartography",
    "Draw",      "Move",     "MoveToExtent", "ZoomIn", "ZoomOut"};

bool is_function_name(std::string_view name) noexcept;

enum class ParseErrorKind { UnknownFunction, ArityMismatch, TypeMismatch, SyntaxError };

std::string_view to_string(ParseErrorKind kind) noexcept;

class ParseError : public Error {
public:
    ParseError(ParseErrorKind kind, std::size_t position, const std::string& detail);

    ParseErrorKind kind() const noexcept { return kind_; }
    // Byte offset into the input where the problem was detected.
    std::size_t position() const noexcept { return position_; }

private:
    ParseErrorKind kind_;
    std::size_t position_;
};

GisCall parse_call(std::string_view text);

// Non-throwing variant; the error (if any) is written to *error.
std::optional<GisCall> try_parse_call(std::string_view text, ParseErrorKind* error = nullptr);

std::string serialize_call(const GisCall& call);

std::string_view function_name(const GisCall& call) noexcept;

std::string_view to_string(GeometryKind kind) noexcept;
std::string_view to_string(DrawShape shape) noexcept;
std::string_view to_string(CartoProperty property) noexcept;

// Case-insensitive enum lookups; std::nullopt for unknown values.
std::optional<GeometryKind> parse_geometry_kind(std::string_view text) noexcept;
std::optional<DrawShape> parse_draw_shape(std::string_view text) noexcept;
std::optional<CartoProperty> parse_carto_property(std::string_view text) noexcept;

} // namespace geocmd
