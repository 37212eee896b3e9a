#include "geocmd/dataset.hpp"

#include "geocmd/command_model.hpp"
#include "geocmd/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <span>
#include <string_view>
#include <unordered_set>
#include <utility>

namespace geocmd {

namespace {

using json = nlohmann::json;
using Words = std::span<const std::string_view>;

std::string_view kind_code(DatasetErrorKind kind) {
    switch (kind) {
    case DatasetErrorKind::TemplateExhaustion: return "TemplateExhaustion";
    case DatasetErrorKind::MalformedRecord: return "MalformedRecord";
    case DatasetErrorKind::InvalidCall: return "InvalidCall";
    case DatasetErrorKind::InvalidArgument: return "InvalidArgument";
    case DatasetErrorKind::Io: return "IoError";
    }
    return "DatasetError";
}

// ---------------------------------------------------------------------------
// Parameter pools

constexpr std::string_view kLabels[] = {
    "University", "Hospital", "Library",   "Museum",    "Stadium",  "Airport",  "Harbor",
    "Campus",     "Cafe",     "Madrid",    "Portugal",  "Station",  "Park",     "Bakery",
    "Clinic",     "School",   "Market",    "Bridge",    "Tower",    "Castle",   "Lighthouse",
    "Office",     "Warehouse", "Depot",    "Home",      "Hotel",    "Theater",  "Zoo",
    "Gallery",    "Cathedral", "Pharmacy", "Garden",    "Embassy",  "Pier",     "Observatory",
    "Monastery",  "Farm",     "Quarry",    "Summit",    "Basecamp"};

constexpr std::string_view kLayers[] = {
    "OpenMallMap",   "OpenStreetMap", "OpenTopoMap",  "Satellite",    "Terrain",
    "Hybrid",        "Toner",         "DarkMatter",   "Positron",     "Voyager",
    "HumanitarianMap", "CycleMap",    "TransportMap", "OpenSeaMap",   "Imagery",
    "NightLights",   "Relief",        "Hillshade",    "StreetGrid",   "TrailMap",
    "RailwayMap",    "NatGeo",        "OceanBase",    "LightGray",    "Topographic"};

constexpr std::string_view kThemes[] = {
    "seismic activity", "rainfall",    "land cover",  "population density", "flood risk",
    "soil moisture",    "air quality", "traffic",     "wildfire",           "geology",
    "vegetation",       "snow cover",  "elevation",   "temperature",        "wind speed",
    "crop yield"};

constexpr std::string_view kUrlHosts[] = {"example", "maps", "geo", "data", "ows", "tiles",
                                          "gis", "services", "mapserver", "geoserver"};
constexpr std::string_view kUrlDomains[] = {"activity", "org", "com", "net", "gov", "io", "eu", "info"};
constexpr std::string_view kUrlPaths[] = {"wms", "geoserver/wms", "ows", "service/wms",
                                          "cgi-bin/mapserv", "arcgis/services/wms", "wms/v1"};
constexpr std::string_view kUrlSlugs[] = {"seismic", "rain", "landcover", "population", "flood",
                                          "soil", "air", "traffic", "fire", "geology"};

constexpr std::string_view kFileThemes[] = {"zones", "roads",  "rivers",   "parcels", "buildings",
                                            "trails", "wells", "stations", "districts", "lakes",
                                            "railways", "schools", "sensors", "farms"};
constexpr std::string_view kRegions[] = {"NY", "LA", "TX", "CA", "UK", "FR", "DE", "BR",
                                         "IN", "JP", "tehran", "paris", "berlin", "lima"};
constexpr std::string_view kExtensions[] = {"kml", "geojson", "shp", "gpx", "gml", "kmz"};

constexpr std::string_view kColors[] = {
    "ivory", "red",    "blue",  "green",   "black",    "white",   "gray",      "yellow",
    "orange", "purple", "navy", "teal",    "maroon",   "olive",   "beige",     "coral",
    "salmon", "khaki", "lavender", "crimson", "gold",   "silver",  "turquoise", "pink",
    "brown",  "cyan",  "magenta", "indigo"};

constexpr std::string_view kBackgroundWords[] = {"background", "backdrop", "map background"};
constexpr std::string_view kFillWords[] = {"fill", "area fill"};
constexpr std::string_view kStrokeWords[] = {"stroke", "outline", "border"};

constexpr std::string_view kSuffixes[] = {"",           " please",  " now",   " for me",
                                          " right now", " if you can", " thanks", " quickly",
                                          " when ready", " asap"};
constexpr std::string_view kTerminators[] = {"", ".", "!"};

// ---------------------------------------------------------------------------
// Query templates. Placeholders are replaced by the sampled parameters.

constexpr std::string_view kAddMarkerTemplates[] = {
    "Add marker '{label}' at location {x}, {y}",
    "Show a marker at {x}, {y} with {label} as label",
    "Show marker at {x}, {y} '{label}' is label",
    "Place a pin named {label} at {x}, {y}",
    "Put a marker called {label} on {x}, {y}",
    "Mark {x}, {y} as '{label}'",
    "Drop a pin at [{x}, {y}] labeled {label}",
    "Add a point of interest '{label}' at {x}, {y}",
    "Create a marker for {label} at coordinates {x}, {y}",
    "Pin '{label}' at {x}, {y}",
    "Add a marker labelled {label} at {x}, {y}",
    "Insert a marker at {x}, {y} and call it {label}",
    "Highlight {x}, {y} with a marker titled {label}",
    "Set a marker at {x}, {y} named '{label}'",
    "Add a '{label}' marker at position {x}, {y}",
    "Mark the spot {x}, {y} with label {label}",
};

constexpr std::string_view kAddLayerTemplates[] = {
    "Switch to the {layer} layer for retail therapy",
    "Switch to the {layer} layer",
    "Add the {layer} layer to the map",
    "Show me the {layer} basemap",
    "Turn on the {layer} layer",
    "Load the {layer} base map",
    "I want to see the {layer} layer",
    "Display {layer} tiles",
    "Add a layer called {layer}",
    "Please add a new layer named {layer}",
    "Use {layer} as the base layer",
    "Bring up the {layer} map layer",
    "Overlay the {layer} layer",
    "Change the basemap to {layer}",
    "Activate the {layer} layer",
    "Can you open the {layer} layer",
    "Set {layer} as the active layer",
};

constexpr std::string_view kAddVectorTemplates[] = {
    "Load the {geom} vector using {file}",
    "Add the {geom} features from {file}",
    "Import {file} as a {geom} layer",
    "Open the {geom} file {file}",
    "Display {geom} data stored in {file}",
    "Please load {file} containing {geom} geometries",
    "Show the {geom} dataset from {file} on the map",
    "Upload {file} with {geom} features",
    "Bring in {geom} shapes from {file}",
    "Add vector data {file} of type {geom}",
    "Visualize the {geom} layer in {file}",
    "Read {geom} geometry from {file}",
    "I have a {geom} file called {file}, load it",
    "Render {file} as {geom} features",
    "Load vector file {file} ({geom})",
};

constexpr std::string_view kAddWmsTemplates[] = {
    "Show the {theme} map from WMS URL <{url}>",
    "Add a WMS layer from {url}",
    "Load WMS service at {url}",
    "Connect to the web map service {url}",
    "Add the {theme} WMS from {url}",
    "Display the WMS layer at <{url}>",
    "I need the {theme} data from the WMS endpoint {url}",
    "Please add WMS: {url}",
    "Fetch the {theme} layer via WMS from {url}",
    "Integrate the WMS at {url} into the map",
    "Overlay {theme} from the WMS server {url}",
    "Pull in the remote WMS {url}",
    "Add this WMS URL to the map: {url}",
    "Stream the {theme} WMS layer from {url}",
    "Use the WMS at {url} for {theme}",
};

constexpr std::string_view kCartographyTemplates[] = {
    "Set the {prop} color to {color}",
    "Change the {prop} to {color}",
    "Make the {prop} {color}",
    "I want a {color} {prop}",
    "Use {color} for the {prop}",
    "Paint the {prop} {color}",
    "Switch the {prop} colour to {color}",
    "Can you color the {prop} {color}",
    "Update the {prop} color to {color}",
    "Apply a {color} {prop}",
    "Give the map a {color} {prop}",
    "Set {prop} to {color}",
    "Turn the {prop} {color}",
    "Let the {prop} be {color}",
    "Recolor the {prop} with {color}",
};

constexpr std::string_view kDrawTemplates[] = {
    "Draw a {shape} on the map",
    "Let me draw a {shape}",
    "Start drawing a {shape}",
    "I want to sketch a {shape}",
    "Enable {shape} drawing mode",
    "Activate the {shape} draw tool",
    "Begin a new {shape} drawing",
    "Can I draw {shape}s here",
    "Switch to {shape} drawing",
    "Please draw a {shape} for me",
    "Sketch a {shape} on the canvas",
    "Time to draw a {shape}",
    "Open the drawing tool for a {shape}",
    "Turn on draw mode with {shape}",
    "Draw me a {shape}",
    "Let us draw some {shape}s",
};

constexpr std::string_view kMoveTemplates[] = {
    "Can we go to {x}, {y}",
    "Pan the map to {x}, {y}",
    "Center the view on {x}, {y}",
    "Move to {x}, {y}",
    "Take me to {x}, {y}",
    "Navigate to coordinates {x}, {y}",
    "Fly to {x}, {y}",
    "Jump to location {x}, {y}",
    "Recenter the map at {x}, {y}",
    "Move the map to {x} {y}",
    "Shift the view to {x}, {y}",
    "Head over to {x}, {y}",
    "Go to the point {x}, {y}",
    "Pan over to position {x}, {y}",
    "Centre the map on {x}, {y}",
    "Show me the area around {x}, {y}",
};

constexpr std::string_view kMoveToExtentTemplates[] = {
    "Set map bounds from {a}, {b} to {c}, {d}",
    "Fit the view to the extent {a}, {b}, {c}, {d}",
    "Zoom to the bounding box {a}, {b}, {c}, {d}",
    "Show the extent from {a}, {b} to {c}, {d}",
    "Set the extent to {a}, {b}, {c}, {d}",
    "Limit the map to bounds {a}, {b}, {c}, {d}",
    "Use bbox {a}, {b}, {c}, {d}",
    "Fit map to bounds {a}, {b}, {c}, {d}",
    "Move to extent {a}, {b}, {c}, {d}",
    "Change map extent to {a}, {b} - {c}, {d}",
    "Display the bounding box from {a}, {b} to {c}, {d}",
    "Set the map extent between {a}, {b} and {c}, {d}",
    "Fit the map into {a}, {b}, {c}, {d} bounds",
    "Restrict the view to the extent {a}, {b}, {c}, {d}",
    "Frame the bounding box {a}, {b}, {c}, {d}",
};

constexpr std::string_view kZoomInTemplates[] = {
    "Zoom in by {n} levels to focus on the details",
    "Zoom in {n} levels",
    "Zoom in by {n}",
    "Please zoom in {n} times",
    "Increase the zoom by {n}",
    "Raise zoom level by {n}",
    "Zoom the map in by {n} levels",
    "Can you zoom in {n} steps",
    "Get {n} levels closer",
    "Magnify the view by {n} levels",
    "Bring the map {n} levels closer",
    "Show more detail, zoom in {n}",
    "Push in {n} zoom levels",
    "Enlarge the map by {n} levels",
    "Zoom in {n} levels to see the streets",
};

constexpr std::string_view kZoomOutTemplates[] = {
    "I'd like to zoom out by {n} levels",
    "Zoom out {n} levels",
    "Zoom out by {n}",
    "Please zoom out {n} times",
    "Pull back {n} zoom levels",
    "Decrease the zoom by {n}",
    "Reduce zoom level by {n}",
    "Zoom the map out by {n} levels",
    "Can you zoom out {n} steps",
    "Go {n} levels further out",
    "Step back {n} zoom levels",
    "Widen the view by {n} levels",
    "Show a larger area, zoom out {n}",
    "Back out {n} levels",
    "Lower the zoom by {n} levels",
    "Zoom out {n} levels to see more",
};

// ---------------------------------------------------------------------------

struct Draft {
    std::vector<std::pair<std::string_view, std::string>> slots;
    GisCall call;
};

using Sampler = std::function<Draft(Rng&)>;

struct FunctionSpec {
    std::string_view name;
    Words templates;
    Sampler sample;
};

std::string pick(Rng& rng, Words words) { return std::string(rng.pick(words)); }

// Decimal string with four fractional digits, uniform over [-limit, limit].
std::string coordinate(Rng& rng, int limit) {
    const std::int64_t scaled = rng.between(-static_cast<std::int64_t>(limit) * 10000,
                                            static_cast<std::int64_t>(limit) * 10000);
    const std::int64_t mag = scaled < 0 ? -scaled : scaled;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%lld.%04lld", scaled < 0 ? "-" : "",
                  static_cast<long long>(mag / 10000), static_cast<long long>(mag % 10000));
    return buf;
}

std::string lower_code(Rng& rng, std::size_t len) {
    std::string out;
    for (std::size_t i = 0; i < len; ++i) out += static_cast<char>('a' + rng.below(26));
    return out;
}

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

const std::vector<FunctionSpec>& function_specs() {
    static const std::vector<FunctionSpec> specs = [] {
        std::vector<FunctionSpec> s;
        s.push_back({"AddMarker", kAddMarkerTemplates, [](Rng& rng) {
                         auto label = pick(rng, kLabels);
                         auto x = coordinate(rng, 180);
                         auto y = coordinate(rng, 90);
                         GisCall call = AddMarker{label, {NumberLiteral(x), NumberLiteral(y)}};
                         return Draft{{{"label", label}, {"x", x}, {"y", y}}, std::move(call)};
                     }});
        s.push_back({"AddLayer", kAddLayerTemplates, [](Rng& rng) {
                         auto layer = pick(rng, kLayers);
                         return Draft{{{"layer", layer}}, AddLayer{layer}};
                     }});
        s.push_back({"AddVector", kAddVectorTemplates, [](Rng& rng) {
                         static constexpr GeometryKind kinds[] = {
                             GeometryKind::Point, GeometryKind::Line, GeometryKind::Polyline,
                             GeometryKind::Polygon};
                         const GeometryKind kind = kinds[rng.below(4)];
                         const std::string geom(to_string(kind));
                         std::string file;
                         if (rng.below(2) == 0) file = geom + "_";
                         // One draw per statement: operand order of + is unspecified.
                         file += pick(rng, kFileThemes);
                         file += "_" + pick(rng, kRegions);
                         file += "_" + lower_code(rng, 3);
                         file += "." + pick(rng, kExtensions);
                         return Draft{{{"geom", geom}, {"file", file}}, AddVector{kind, file}};
                     }});
        s.push_back({"AddWMS", kAddWmsTemplates, [](Rng& rng) {
                         std::string url = rng.below(4) == 0 ? "http://" : "https://";
                         url += pick(rng, kUrlHosts);
                         url += "." + pick(rng, kUrlDomains) + "/";
                         if (rng.below(2) == 0) url += pick(rng, kUrlSlugs) + "/";
                         url += pick(rng, kUrlPaths);
                         return Draft{{{"theme", pick(rng, kThemes)}, {"url", url}}, AddWMS{url}};
                     }});
        s.push_back({"Cartography", kCartographyTemplates, [](Rng& rng) {
                         static constexpr CartoProperty props[] = {
                             CartoProperty::Background, CartoProperty::Fill, CartoProperty::Stroke};
                         const CartoProperty prop = props[rng.below(3)];
                         const Words words = prop == CartoProperty::Background ? Words(kBackgroundWords)
                                             : prop == CartoProperty::Fill    ? Words(kFillWords)
                                                                              : Words(kStrokeWords);
                         auto word = pick(rng, words);
                         auto color = pick(rng, kColors);
                         return Draft{{{"prop", word}, {"color", color}},
                                      Cartography{prop, color, std::nullopt}};
                     }});
        s.push_back({"Draw", kDrawTemplates, [](Rng& rng) {
                         static constexpr DrawShape shapes[] = {DrawShape::Point, DrawShape::Line,
                                                                DrawShape::Polygon};
                         const DrawShape shape = shapes[rng.below(3)];
                         std::string word(to_string(shape));
                         if (rng.below(2) == 0) word[0] = static_cast<char>(std::tolower(word[0]));
                         return Draft{{{"shape", word}}, Draw{shape}};
                     }});
        s.push_back({"Move", kMoveTemplates, [](Rng& rng) {
                         auto x = coordinate(rng, 180);
                         auto y = coordinate(rng, 90);
                         return Draft{{{"x", x}, {"y", y}}, Move{NumberLiteral(x), NumberLiteral(y)}};
                     }});
        s.push_back({"MoveToExtent", kMoveToExtentTemplates, [](Rng& rng) {
                         auto a = coordinate(rng, 180);
                         auto b = coordinate(rng, 90);
                         auto c = coordinate(rng, 180);
                         auto d = coordinate(rng, 90);
                         GisCall call = MoveToExtent{{NumberLiteral(a), NumberLiteral(b),
                                                      NumberLiteral(c), NumberLiteral(d)}};
                         return Draft{{{"a", a}, {"b", b}, {"c", c}, {"d", d}}, std::move(call)};
                     }});
        s.push_back({"ZoomIn", kZoomInTemplates, [](Rng& rng) {
                         const auto n = static_cast<std::uint32_t>(rng.between(1, 10));
                         return Draft{{{"n", std::to_string(n)}}, ZoomIn{n}};
                     }});
        s.push_back({"ZoomOut", kZoomOutTemplates, [](Rng& rng) {
                         const auto n = static_cast<std::uint32_t>(rng.between(1, 10));
                         return Draft{{{"n", std::to_string(n)}}, ZoomOut{n}};
                     }});
        return s;
    }();
    return specs;
}

std::string render(std::string_view tmpl, const Draft& draft) {
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            const std::size_t close = tmpl.find('}', i);
            const std::string_view key = tmpl.substr(i + 1, close - i - 1);
            const auto it = std::find_if(draft.slots.begin(), draft.slots.end(),
                                         [&](const auto& kv) { return kv.first == key; });
            out += it->second;
            i = close + 1;
        } else {
            out += tmpl[i++];
        }
    }
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Generation gives up on a function after this many consecutive duplicates.
constexpr std::size_t kMaxConsecutiveDuplicates = 20000;

} // namespace

DatasetError::DatasetError(DatasetErrorKind kind, const std::string& message)
    : Error(std::string(kind_code(kind)), message), kind_(kind) {}

std::vector<Sample> generate(std::uint64_t seed, std::uint32_t per_function) {
    if (per_function < 1)
        throw DatasetError(DatasetErrorKind::InvalidArgument, "per_function must be >= 1");

    Rng rng(seed);
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(per_function) * kFunctionNames.size());
    std::unordered_set<std::string> seen;

    for (const FunctionSpec& spec : function_specs()) {
        std::uint32_t made = 0;
        std::size_t misses = 0;
        while (made < per_function) {
            const std::string_view tmpl = rng.pick(spec.templates);
            const Draft draft = spec.sample(rng);
            std::string query = render(tmpl, draft);
            query += rng.pick(Words(kSuffixes));
            query += rng.pick(Words(kTerminators));
            query = trim(capitalize(std::move(query)));

            if (!seen.insert(query).second) {
                if (++misses > kMaxConsecutiveDuplicates)
                    throw DatasetError(DatasetErrorKind::TemplateExhaustion,
                                       "cannot produce " + std::to_string(per_function) +
                                           " unique queries for " + std::string(spec.name) +
                                           " (stuck at " + std::to_string(made) + ")");
                continue;
            }
            misses = 0;
            out.push_back(Sample{out.size(), std::string(spec.name), std::move(query),
                                 serialize_call(draft.call)});
            ++made;
        }
    }
    return out;
}

DatasetSplit split(const std::vector<Sample>& samples, const SplitSpec& spec) {
    if (samples.empty()) throw DatasetError(DatasetErrorKind::InvalidArgument, "cannot split an empty dataset");
    const auto in_unit = [](double f) { return f > 0.0 && f < 1.0; };
    if (!in_unit(spec.train_fraction) || !in_unit(spec.val_fraction_of_test))
        throw DatasetError(DatasetErrorKind::InvalidArgument, "split fractions must lie in (0, 1)");

    std::vector<Sample> shuffled = samples;
    Rng rng(spec.seed);
    rng.shuffle(std::span<Sample>(shuffled));

    const std::size_t n = shuffled.size();
    // A small epsilon keeps 0.8 * 2000 from landing on 1599.999...
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.train_fraction + 1e-9));
    const std::size_t rest = n - n_train;
    const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(rest) * spec.val_fraction_of_test + 1e-9));

    DatasetSplit out;
    const auto begin = shuffled.begin();
    out.train.assign(begin, begin + static_cast<std::ptrdiff_t>(n_train));
    out.val.assign(begin + static_cast<std::ptrdiff_t>(n_train),
                   begin + static_cast<std::ptrdiff_t>(n_train + n_val));
    out.test.assign(begin + static_cast<std::ptrdiff_t>(n_train + n_val), shuffled.end());
    return out;
}

void validate_sample(const Sample& sample) {
    GisCall call;
    try {
        call = parse_call(sample.call);
    } catch (const ParseError& e) {
        throw DatasetError(DatasetErrorKind::InvalidCall,
                           "sample " + std::to_string(sample.id) + ": " + e.what());
    }
    if (function_name(call) != sample.function)
        throw DatasetError(DatasetErrorKind::InvalidCall,
                           "sample " + std::to_string(sample.id) + ": call is " +
                               std::string(function_name(call)) + " but label is " + sample.function);
}

std::vector<Sample> load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError(DatasetErrorKind::Io, "cannot open " + path.string());

    std::vector<Sample> out;
    std::unordered_set<std::string> queries;
    std::unordered_set<std::uint64_t> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto where = path.string() + ":" + std::to_string(line_no);
        Sample s;
        try {
            const json j = json::parse(line);
            s.id = j.at("id").get<std::uint64_t>();
            s.function = j.at("function").get<std::string>();
            s.query = j.at("query").get<std::string>();
            s.call = j.at("call").get<std::string>();
        } catch (const json::exception& e) {
            throw DatasetError(DatasetErrorKind::MalformedRecord, where + ": " + e.what());
        }
        if (trim(s.query).empty())
            throw DatasetError(DatasetErrorKind::MalformedRecord, where + ": empty query");
        if (!queries.insert(trim(s.query)).second)
            throw DatasetError(DatasetErrorKind::MalformedRecord, where + ": duplicate query '" + s.query + "'");
        if (!ids.insert(s.id).second)
            throw DatasetError(DatasetErrorKind::MalformedRecord,
                               where + ": duplicate id " + std::to_string(s.id));
        try {
            validate_sample(s);
        } catch (const DatasetError& e) {
            throw DatasetError(DatasetErrorKind::InvalidCall, where + ": " + e.what());
        }
        out.push_back(std::move(s));
    }
    return out;
}

void save_jsonl(const std::vector<Sample>& samples, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DatasetError(DatasetErrorKind::Io, "cannot write " + path.string());
    for (const Sample& s : samples) {
        // Keys in a fixed order: id, function, query, call.
        nlohmann::ordered_json j;
        j["id"] = s.id;
        j["function"] = s.function;
        j["query"] = s.query;
        j["call"] = s.call;
        out << j.dump() << '\n';
    }
}

std::size_t template_count(std::string_view function) {
    for (const FunctionSpec& spec : function_specs())
        if (spec.name == function) return spec.templates.size();
    return 0;
}

} // namespace geocmd
