#include "scenoforge/net_model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "scenoforge/util.hpp"
#include "scenoforge/xml.hpp"

namespace scenoforge {

namespace {

constexpr std::string_view kIndent = "    ";

std::string format_point(const Point& p) {
  return fmt::format("{},{}", format_fixed(p.x), format_fixed(p.y));
}

std::string format_polyline(const Polyline& line) {
  std::string out;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (i) out.push_back(' ');
    out += format_point(line[i]);
  }
  return out;
}

std::optional<Polyline> parse_polyline(std::string_view text) {
  Polyline out;
  for (const std::string& token : split(text, ' ')) {
    if (token.empty()) continue;
    const auto parts = split(token, ',');
    if (parts.size() != 2) return std::nullopt;
    const auto x = parse_double(parts[0]);
    const auto y = parse_double(parts[1]);
    if (!x || !y) return std::nullopt;
    out.push_back({*x, *y});
  }
  return out;
}

// Shared attribute cursor: looks up values, remembers which attributes were
// consumed so leftovers can be flagged (strict) or listed (lenient).
class AttrReader {
 public:
  explicit AttrReader(const xml::Element& element) : element_(element) {}

  std::optional<std::string> take(std::string_view name) {
    consumed_.insert(std::string(name));
    return element_.attribute(name);
  }

  std::vector<std::string> leftovers() const {
    std::vector<std::string> out;
    for (const auto& attr : element_.attributes) {
      if (!consumed_.count(attr.name)) out.push_back(attr.name);
    }
    return out;
  }

 private:
  const xml::Element& element_;
  std::set<std::string> consumed_;
};

struct PlainFileParser {
  Diagnostics diags;
  std::string file_label;

  void error(DiagCode code, std::string subject, std::string message) {
    diags.push_back(make_diag(code, std::move(subject), std::move(message)));
  }

  void check_identifier(const std::string& id, int line) {
    if (!valid_identifier(id)) {
      error(DiagCode::BadAttribute, id,
            fmt::format("{} line {}: id \"{}\" is not a plain identifier "
                        "(nonempty, no whitespace, no '#' or ':')",
                        file_label, line, id));
    }
  }

  std::optional<double> number(const xml::Element& el, AttrReader& attrs,
                               std::string_view name, bool required,
                               const std::string& owner) {
    const auto raw = attrs.take(name);
    if (!raw) {
      if (required) {
        error(DiagCode::BadAttribute, owner,
              fmt::format("{} line {}: <{}> \"{}\" is missing required attribute "
                          "\"{}\"",
                          file_label, el.line, el.name, owner, name));
      }
      return std::nullopt;
    }
    const auto value = parse_double(*raw);
    if (!value) {
      error(DiagCode::BadAttribute, owner,
            fmt::format("{} line {}: attribute {}=\"{}\" on \"{}\" is not a finite "
                        "number",
                        file_label, el.line, name, *raw, owner));
      return std::nullopt;
    }
    return value;
  }

  void flag_unknown(const xml::Element& el, const AttrReader& attrs,
                    const std::string& owner) {
    for (const std::string& name : attrs.leftovers()) {
      error(DiagCode::UnknownAttribute, name,
            fmt::format("{} line {}: unknown attribute \"{}\" on <{}> \"{}\"; remove "
                        "it, only the documented attributes are allowed",
                        file_label, el.line, name, el.name, owner));
    }
  }
};

}  // namespace

// --- enum names -------------------------------------------------------------

std::string_view node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::priority: return "priority";
    case NodeKind::traffic_light: return "traffic_light";
    case NodeKind::unregulated: return "unregulated";
  }
  return "priority";
}

std::optional<NodeKind> node_kind_from(std::string_view name) {
  if (name == "priority") return NodeKind::priority;
  if (name == "traffic_light") return NodeKind::traffic_light;
  if (name == "unregulated") return NodeKind::unregulated;
  return std::nullopt;
}

char connection_dir_code(ConnectionDir dir) {
  switch (dir) {
    case ConnectionDir::straight: return 's';
    case ConnectionDir::left: return 'l';
    case ConnectionDir::right: return 'r';
    case ConnectionDir::turn: return 't';
  }
  return 's';
}

std::optional<ConnectionDir> connection_dir_from(std::string_view code) {
  if (code == "s") return ConnectionDir::straight;
  if (code == "l" || code == "L") return ConnectionDir::left;
  if (code == "r" || code == "R") return ConnectionDir::right;
  if (code == "t") return ConnectionDir::turn;
  return std::nullopt;
}

std::string_view vehicle_kind_name(VehicleKind kind) {
  return kind == VehicleKind::AV ? "AV" : "BV";
}

std::optional<VehicleKind> vehicle_kind_from(std::string_view name) {
  if (name == "AV") return VehicleKind::AV;
  if (name == "BV") return VehicleKind::BV;
  return std::nullopt;
}

std::string_view diag_code_name(DiagCode code) {
  switch (code) {
    case DiagCode::UnknownNode: return "UnknownNode";
    case DiagCode::UnknownEdge: return "UnknownEdge";
    case DiagCode::UnknownLane: return "UnknownLane";
    case DiagCode::DuplicateId: return "DuplicateId";
    case DiagCode::BadAttribute: return "BadAttribute";
    case DiagCode::UnknownAttribute: return "UnknownAttribute";
    case DiagCode::FormatError: return "FormatError";
    case DiagCode::Unreachable: return "Unreachable";
    case DiagCode::TooShort: return "TooShort";
    case DiagCode::CountMismatch: return "CountMismatch";
  }
  return "FormatError";
}

Diagnostic make_diag(DiagCode code, std::string subject, std::string message) {
  if (message.empty()) message = std::string(diag_code_name(code));
  // Every message carries its subject verbatim so feedback prompts can be
  // assembled without re-deriving context.
  if (!subject.empty() && message.find(subject) == std::string::npos) {
    message += fmt::format(" (subject: {})", subject);
  }
  return Diagnostic{code, std::move(subject), std::move(message)};
}

std::string to_string(const Diagnostic& diag) {
  return fmt::format("{}[{}]: {}", diag_code_name(diag.code), diag.subject,
                     diag.message);
}

// --- model helpers ----------------------------------------------------------

double CompiledEdge::mean_lane_length() const {
  if (lanes.empty()) return 0.0;
  double total = 0.0;
  for (const Lane& lane : lanes) total += lane.length;
  return total / static_cast<double>(lanes.size());
}

const CompiledEdge* CompiledNetwork::find_edge(std::string_view id) const {
  for (const auto& edge : edges) {
    if (edge.id == id) return &edge;
  }
  return nullptr;
}

const Junction* CompiledNetwork::find_junction(std::string_view id) const {
  for (const auto& junction : junctions) {
    if (junction.id == id) return &junction;
  }
  return nullptr;
}

// --- plain format -----------------------------------------------------------

namespace {

void parse_plain_nodes(const xml::Element& root, NetworkPlan& plan,
                       PlainFileParser& ctx) {
  if (root.name != "nodes") {
    ctx.error(DiagCode::FormatError, root.name,
              fmt::format("node file line {}: root element must be <nodes>, found "
                          "<{}>",
                          root.line, root.name));
    return;
  }
  std::string pending_comment;
  std::set<std::string> seen;
  for (const auto& item : root.children) {
    if (item.kind == xml::Item::Kind::comment) {
      if (!pending_comment.empty()) pending_comment += "\n";
      pending_comment += item.text;
      continue;
    }
    if (item.kind == xml::Item::Kind::text) {
      ctx.error(DiagCode::FormatError, trim(item.text),
                fmt::format("node file: stray text \"{}\" inside <nodes>",
                            trim(item.text)));
      continue;
    }
    const xml::Element& el = item.element;
    if (el.name != "node") {
      ctx.error(DiagCode::FormatError, el.name,
                fmt::format("node file line {}: unexpected element <{}> inside "
                            "<nodes>; only <node> is allowed",
                            el.line, el.name));
      pending_comment.clear();
      continue;
    }
    AttrReader attrs(el);
    NodeDecl node;
    node.comment = pending_comment;
    pending_comment.clear();
    const auto id = attrs.take("id");
    if (!id) {
      ctx.error(DiagCode::BadAttribute, "node",
                fmt::format("node file line {}: <node> is missing required "
                            "attribute \"id\"",
                            el.line));
    } else {
      node.id = *id;
      ctx.check_identifier(node.id, el.line);
      if (!seen.insert(node.id).second) {
        ctx.error(DiagCode::DuplicateId, node.id,
                  fmt::format("node file line {}: node id \"{}\" is declared more "
                              "than once",
                              el.line, node.id));
      }
    }
    const auto x = ctx.number(el, attrs, "x", true, node.id.empty() ? "node" : node.id);
    const auto y = ctx.number(el, attrs, "y", true, node.id.empty() ? "node" : node.id);
    if (x) node.pos.x = *x;
    if (y) node.pos.y = *y;
    if (const auto type = attrs.take("type")) {
      const auto kind = node_kind_from(*type);
      if (!kind) {
        ctx.error(DiagCode::BadAttribute, node.id,
                  fmt::format("node file line {}: node \"{}\" has unsupported "
                              "type \"{}\"; use priority, traffic_light or "
                              "unregulated",
                              el.line, node.id, *type));
      } else {
        node.kind = *kind;
      }
    }
    ctx.flag_unknown(el, attrs, node.id.empty() ? "node" : node.id);
    plan.nodes.push_back(std::move(node));
  }
  if (!pending_comment.empty()) {
    plan.node_trailing_comments.push_back(pending_comment);
  }
}

void parse_plain_edges(const xml::Element& root, NetworkPlan& plan,
                       PlainFileParser& ctx) {
  if (root.name != "edges") {
    ctx.error(DiagCode::FormatError, root.name,
              fmt::format("edge file line {}: root element must be <edges>, found "
                          "<{}>",
                          root.line, root.name));
    return;
  }
  std::string pending_comment;
  std::set<std::string> seen;
  for (const auto& item : root.children) {
    if (item.kind == xml::Item::Kind::comment) {
      if (!pending_comment.empty()) pending_comment += "\n";
      pending_comment += item.text;
      continue;
    }
    if (item.kind == xml::Item::Kind::text) {
      ctx.error(DiagCode::FormatError, trim(item.text),
                fmt::format("edge file: stray text \"{}\" inside <edges>",
                            trim(item.text)));
      continue;
    }
    const xml::Element& el = item.element;
    if (el.name != "edge") {
      ctx.error(DiagCode::FormatError, el.name,
                fmt::format("edge file line {}: unexpected element <{}> inside "
                            "<edges>; only <edge> is allowed",
                            el.line, el.name));
      pending_comment.clear();
      continue;
    }
    AttrReader attrs(el);
    EdgeDecl edge;
    edge.comment = pending_comment;
    pending_comment.clear();
    const auto id = attrs.take("id");
    if (!id) {
      ctx.error(DiagCode::BadAttribute, "edge",
                fmt::format("edge file line {}: <edge> is missing required "
                            "attribute \"id\"",
                            el.line));
    } else {
      edge.id = *id;
      ctx.check_identifier(edge.id, el.line);
      if (!seen.insert(edge.id).second) {
        ctx.error(DiagCode::DuplicateId, edge.id,
                  fmt::format("edge file line {}: edge id \"{}\" is declared more "
                              "than once",
                              el.line, edge.id));
      }
    }
    const std::string owner = edge.id.empty() ? "edge" : edge.id;
    for (const auto* field : {"from", "to"}) {
      const auto value = attrs.take(field);
      if (!value) {
        ctx.error(DiagCode::BadAttribute, owner,
                  fmt::format("edge file line {}: edge \"{}\" is missing required "
                              "attribute \"{}\"",
                              el.line, owner, field));
        continue;
      }
      ctx.check_identifier(*value, el.line);
      (std::string_view(field) == "from" ? edge.from : edge.to) = *value;
    }
    if (const auto lanes = attrs.take("numLanes")) {
      const auto value = parse_int(*lanes);
      if (!value) {
        ctx.error(DiagCode::BadAttribute, owner,
                  fmt::format("edge file line {}: numLanes=\"{}\" on edge \"{}\" is "
                              "not an integer",
                              el.line, *lanes, owner));
      } else {
        edge.num_lanes = static_cast<int>(*value);
      }
    }
    if (const auto speed = ctx.number(el, attrs, "speed", false, owner)) {
      edge.speed = *speed;
    }
    if (const auto name = attrs.take("name")) edge.name = *name;
    if (const auto shape = attrs.take("shape")) {
      const auto line = parse_polyline(*shape);
      if (!line) {
        ctx.error(DiagCode::BadAttribute, owner,
                  fmt::format("edge file line {}: shape=\"{}\" on edge \"{}\" is not "
                              "a space-separated list of x,y pairs",
                              el.line, *shape, owner));
      } else if (line->size() < 2) {
        ctx.error(DiagCode::BadAttribute, owner,
                  fmt::format("edge file line {}: shape of edge \"{}\" needs at "
                              "least 2 points",
                              el.line, owner));
      } else {
        edge.shape = *line;
      }
    }
    ctx.flag_unknown(el, attrs, owner);
    plan.edges.push_back(std::move(edge));
  }
  if (!pending_comment.empty()) {
    plan.edge_trailing_comments.push_back(pending_comment);
  }
}

}  // namespace

Fallible<NetworkPlan> parse_plain(const std::string& node_text,
                                  const std::string& edge_text) {
  PlainFileParser ctx;
  NetworkPlan plan;

  const xml::ParseResult nodes = xml::parse(node_text);
  ctx.file_label = "node file";
  if (!nodes.ok()) {
    ctx.error(DiagCode::FormatError, "nodes",
              fmt::format("node file is not well-formed XML (line {}): {}. Emit a "
                          "single <nodes> document",
                          nodes.error->line, nodes.error->message));
  } else {
    parse_plain_nodes(*nodes.root, plan, ctx);
  }

  const xml::ParseResult edges = xml::parse(edge_text);
  ctx.file_label = "edge file";
  if (!edges.ok()) {
    ctx.error(DiagCode::FormatError, "edges",
              fmt::format("edge file is not well-formed XML (line {}): {}. Emit a "
                          "single <edges> document",
                          edges.error->line, edges.error->message));
  } else {
    parse_plain_edges(*edges.root, plan, ctx);
  }

  if (!ctx.diags.empty()) return ctx.diags;
  return plan;
}

std::pair<std::string, std::string> serialize_plain(const NetworkPlan& plan) {
  std::string nodes;
  if (plan.nodes.empty() && plan.node_trailing_comments.empty()) {
    nodes = "<nodes/>\n";
  } else {
    nodes = "<nodes>\n";
    for (const NodeDecl& node : plan.nodes) {
      if (!node.comment.empty()) {
        nodes += fmt::format("{}<!--{}-->\n", kIndent, xml::escape_comment(node.comment));
      }
      nodes += fmt::format("{}<node id=\"{}\" x=\"{}\" y=\"{}\"",
                           kIndent, xml::escape_attribute(node.id),
                           format_fixed(node.pos.x), format_fixed(node.pos.y));
      if (node.kind != NodeKind::priority) {
        nodes += fmt::format(" type=\"{}\"", node_kind_name(node.kind));
      }
      nodes += "/>\n";
    }
    for (const std::string& comment : plan.node_trailing_comments) {
      nodes += fmt::format("{}<!--{}-->\n", kIndent, xml::escape_comment(comment));
    }
    nodes += "</nodes>\n";
  }

  std::string edges;
  if (plan.edges.empty() && plan.edge_trailing_comments.empty()) {
    edges = "<edges/>\n";
  } else {
    edges = "<edges>\n";
    for (const EdgeDecl& edge : plan.edges) {
      if (!edge.comment.empty()) {
        edges += fmt::format("{}<!--{}-->\n", kIndent, xml::escape_comment(edge.comment));
      }
      edges += fmt::format(
          "{}<edge id=\"{}\" from=\"{}\" to=\"{}\" numLanes=\"{}\" speed=\"{}\"",
          kIndent, xml::escape_attribute(edge.id), xml::escape_attribute(edge.from),
          xml::escape_attribute(edge.to), edge.num_lanes, format_fixed(edge.speed));
      if (edge.name) {
        edges += fmt::format(" name=\"{}\"", xml::escape_attribute(*edge.name));
      }
      if (!edge.shape.empty()) {
        edges += fmt::format(" shape=\"{}\"", format_polyline(edge.shape));
      }
      edges += "/>\n";
    }
    for (const std::string& comment : plan.edge_trailing_comments) {
      edges += fmt::format("{}<!--{}-->\n", kIndent, xml::escape_comment(comment));
    }
    edges += "</edges>\n";
  }
  return {nodes, edges};
}

// --- net format -------------------------------------------------------------

namespace {

struct NetParser {
  Diagnostics diags;
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }

  void error(DiagCode code, std::string subject, std::string message) {
    diags.push_back(make_diag(code, std::move(subject), std::move(message)));
  }

  static bool internal_id(std::string_view id) {
    return !id.empty() && id.front() == ':';
  }
};

}  // namespace

Fallible<NetParseResult> parse_net(const std::string& net_text) {
  NetParser ctx;
  const xml::ParseResult doc = xml::parse(net_text);
  if (!doc.ok()) {
    return make_diag(DiagCode::FormatError, "net",
                     fmt::format("net file is not well-formed XML (line {}): {}",
                                 doc.error->line, doc.error->message));
  }
  const xml::Element& root = *doc.root;
  if (root.name != "net") {
    return make_diag(DiagCode::FormatError, root.name,
                     fmt::format("net file root element must be <net>, found <{}>",
                                 root.name));
  }

  CompiledNetwork net;
  for (const xml::Element* el : root.child_elements()) {
    if (el->name == "edge") {
      const auto function = el->attribute("function");
      const auto id = el->attribute("id");
      if (!id) {
        ctx.error(DiagCode::BadAttribute, "edge",
                  fmt::format("net line {}: <edge> without id", el->line));
        continue;
      }
      if ((function && *function != "normal") || NetParser::internal_id(*id)) {
        ctx.warn(fmt::format("skipped non-plain edge \"{}\"", *id));
        continue;
      }
      CompiledEdge edge;
      edge.id = *id;
      const auto from = el->attribute("from");
      const auto to = el->attribute("to");
      if (!from || !to) {
        ctx.warn(fmt::format("skipped edge \"{}\" without from/to", *id));
        continue;
      }
      edge.from_junction = *from;
      edge.to_junction = *to;
      if (const auto name = el->attribute("name")) edge.name = *name;
      for (const auto& attr : el->attributes) {
        if (attr.name != "id" && attr.name != "from" && attr.name != "to" &&
            attr.name != "name" && attr.name != "function") {
          ctx.warn(fmt::format("ignored edge attribute \"{}\" on \"{}\"", attr.name,
                               edge.id));
        }
      }
      for (const xml::Element* child : el->child_elements()) {
        if (child->name != "lane") {
          ctx.warn(fmt::format("ignored <{}> inside edge \"{}\"", child->name,
                               edge.id));
          continue;
        }
        Lane lane;
        const auto lane_id = child->attribute("id");
        const auto index = child->attribute("index");
        const auto speed = child->attribute("speed");
        const auto length = child->attribute("length");
        const auto shape = child->attribute("shape");
        if (!lane_id || !index || !speed || !length || !shape) {
          ctx.error(DiagCode::BadAttribute, edge.id,
                    fmt::format("net line {}: lane of edge \"{}\" must carry id, "
                                "index, speed, length and shape",
                                child->line, edge.id));
          continue;
        }
        lane.id = *lane_id;
        const auto index_value = parse_int(*index);
        const auto speed_value = parse_double(*speed);
        const auto length_value = parse_double(*length);
        const auto shape_value = parse_polyline(*shape);
        if (!index_value || !speed_value || !length_value || !shape_value ||
            shape_value->size() < 2) {
          ctx.error(DiagCode::BadAttribute, lane.id,
                    fmt::format("net line {}: lane \"{}\" has malformed numeric or "
                                "shape attributes",
                                child->line, lane.id));
          continue;
        }
        lane.index = static_cast<int>(*index_value);
        lane.speed = *speed_value;
        lane.length = *length_value;
        lane.shape = *shape_value;
        for (const auto& attr : child->attributes) {
          if (attr.name != "id" && attr.name != "index" && attr.name != "speed" &&
              attr.name != "length" && attr.name != "shape") {
            ctx.warn(fmt::format("ignored lane attribute \"{}\" on \"{}\"",
                                 attr.name, lane.id));
          }
        }
        edge.lanes.push_back(std::move(lane));
      }
      std::sort(edge.lanes.begin(), edge.lanes.end(),
                [](const Lane& a, const Lane& b) { return a.index < b.index; });
      if (edge.lanes.empty()) {
        ctx.error(DiagCode::BadAttribute, edge.id,
                  fmt::format("edge \"{}\" has no lanes", edge.id));
        continue;
      }
      net.edges.push_back(std::move(edge));
    } else if (el->name == "junction") {
      const auto id = el->attribute("id");
      if (!id) {
        ctx.error(DiagCode::BadAttribute, "junction",
                  fmt::format("net line {}: <junction> without id", el->line));
        continue;
      }
      const auto type = el->attribute("type");
      if (NetParser::internal_id(*id) || (type && *type == "internal")) {
        ctx.warn(fmt::format("skipped internal junction \"{}\"", *id));
        continue;
      }
      Junction junction;
      junction.id = *id;
      if (type) {
        if (const auto kind = node_kind_from(*type)) {
          junction.kind = *kind;
        } else {
          ctx.warn(fmt::format("junction \"{}\" type \"{}\" mapped to priority",
                               junction.id, *type));
          junction.kind = NodeKind::priority;
        }
      }
      const auto x = el->attribute("x");
      const auto y = el->attribute("y");
      const auto xv = x ? parse_double(*x) : std::nullopt;
      const auto yv = y ? parse_double(*y) : std::nullopt;
      if (!xv || !yv) {
        ctx.error(DiagCode::BadAttribute, junction.id,
                  fmt::format("junction \"{}\" needs finite x and y", junction.id));
        continue;
      }
      junction.pos = {*xv, *yv};
      if (const auto inc = el->attribute("incLanes")) {
        for (const std::string& lane : split(*inc, ' ')) {
          if (lane.empty()) continue;
          if (NetParser::internal_id(lane)) {
            ctx.warn(fmt::format("dropped internal lane \"{}\" from incLanes of "
                                 "\"{}\"",
                                 lane, junction.id));
            continue;
          }
          junction.incoming_lanes.push_back(lane);
        }
      }
      if (const auto shape = el->attribute("shape")) {
        if (const auto line = parse_polyline(*shape)) {
          junction.shape = *line;
          if (junction.shape.size() >= 3 &&
              !(junction.shape.front() == junction.shape.back())) {
            junction.shape.push_back(junction.shape.front());
          }
        } else {
          ctx.error(DiagCode::BadAttribute, junction.id,
                    fmt::format("junction \"{}\" has a malformed shape", junction.id));
        }
      }
      for (const auto& attr : el->attributes) {
        if (attr.name != "id" && attr.name != "type" && attr.name != "x" &&
            attr.name != "y" && attr.name != "incLanes" && attr.name != "shape") {
          ctx.warn(fmt::format("ignored junction attribute \"{}\" on \"{}\"",
                               attr.name, junction.id));
        }
      }
      net.junctions.push_back(std::move(junction));
    } else if (el->name == "connection") {
      const auto from = el->attribute("from");
      const auto to = el->attribute("to");
      if (!from || !to) {
        ctx.error(DiagCode::BadAttribute, "connection",
                  fmt::format("net line {}: <connection> needs from and to",
                              el->line));
        continue;
      }
      if (NetParser::internal_id(*from) || NetParser::internal_id(*to)) {
        ctx.warn(fmt::format("skipped internal connection {} -> {}", *from, *to));
        continue;
      }
      Connection connection;
      connection.from_edge = *from;
      connection.to_edge = *to;
      const auto from_lane = el->attribute("fromLane");
      const auto to_lane = el->attribute("toLane");
      const auto fl = from_lane ? parse_int(*from_lane) : std::nullopt;
      const auto tl = to_lane ? parse_int(*to_lane) : std::nullopt;
      if (!fl || !tl) {
        ctx.error(DiagCode::BadAttribute, *from,
                  fmt::format("connection {} -> {} needs integer fromLane/toLane",
                              *from, *to));
        continue;
      }
      connection.from_lane = static_cast<int>(*fl);
      connection.to_lane = static_cast<int>(*tl);
      if (const auto dir = el->attribute("dir")) {
        if (const auto parsed = connection_dir_from(*dir)) {
          connection.dir = *parsed;
        } else {
          ctx.warn(fmt::format("skipped connection {} -> {} with dir \"{}\"", *from,
                               *to, *dir));
          continue;
        }
      }
      for (const auto& attr : el->attributes) {
        if (attr.name != "from" && attr.name != "to" && attr.name != "fromLane" &&
            attr.name != "toLane" && attr.name != "dir") {
          ctx.warn(fmt::format("ignored connection attribute \"{}\" on {} -> {}",
                               attr.name, *from, *to));
        }
      }
      net.connections.push_back(std::move(connection));
    } else {
      ctx.warn(fmt::format("ignored <{}> element", el->name));
    }
  }

  // Referential closure over what survived the lenient pass.
  for (const CompiledEdge& edge : net.edges) {
    for (const auto* junction_id : {&edge.from_junction, &edge.to_junction}) {
      if (!net.find_junction(*junction_id)) {
        ctx.error(DiagCode::UnknownNode, *junction_id,
                  fmt::format("edge \"{}\" references junction \"{}\" which does "
                              "not exist",
                              edge.id, *junction_id));
      }
    }
  }
  for (const Connection& connection : net.connections) {
    const CompiledEdge* from = net.find_edge(connection.from_edge);
    const CompiledEdge* to = net.find_edge(connection.to_edge);
    if (!from) {
      ctx.error(DiagCode::UnknownEdge, connection.from_edge,
                fmt::format("connection references edge \"{}\" which does not exist",
                            connection.from_edge));
    }
    if (!to) {
      ctx.error(DiagCode::UnknownEdge, connection.to_edge,
                fmt::format("connection references edge \"{}\" which does not exist",
                            connection.to_edge));
    }
    if (from && (connection.from_lane < 0 ||
                 connection.from_lane >= static_cast<int>(from->lanes.size()))) {
      const std::string lane_id =
          fmt::format("{}_{}", connection.from_edge, connection.from_lane);
      ctx.error(DiagCode::UnknownLane, lane_id,
                fmt::format("An unknown lane: connection from \"{}\" uses "
                            "fromLane=\"{}\" but the edge has only {} " "lane(s)",
                            lane_id, connection.from_lane,
                            from->lanes.size()));
    }
    if (to && (connection.to_lane < 0 ||
               connection.to_lane >= static_cast<int>(to->lanes.size()))) {
      const std::string lane_id =
          fmt::format("{}_{}", connection.to_edge, connection.to_lane);
      ctx.error(DiagCode::UnknownLane, lane_id,
                fmt::format("An unknown lane: connection to \"{}\" uses "
                            "toLane=\"{}\" but the edge has only {} lane(s)",
                            lane_id, connection.to_lane, to->lanes.size()));
    }
  }
  for (const Junction& junction : net.junctions) {
    for (const std::string& lane_id : junction.incoming_lanes) {
      const std::size_t sep = lane_id.rfind('_');
      const CompiledEdge* edge =
          sep == std::string::npos ? nullptr : net.find_edge(lane_id.substr(0, sep));
      if (!edge) {
        ctx.error(DiagCode::UnknownLane, lane_id,
                  fmt::format("junction \"{}\" lists incoming lane \"{}\" of an "
                              "unknown edge",
                              junction.id, lane_id));
      }
    }
  }
  if (net.edges.empty()) {
    ctx.error(DiagCode::FormatError, "net",
              "net file contains no usable edges");
  }

  if (!ctx.diags.empty()) return ctx.diags;
  NetParseResult result;
  result.network = std::move(net);
  result.warnings = std::move(ctx.warnings);
  return result;
}

std::string serialize_net(const CompiledNetwork& net) {
  std::string out = "<net>\n";
  for (const CompiledEdge& edge : net.edges) {
    out += fmt::format("{}<edge id=\"{}\" from=\"{}\" to=\"{}\"", kIndent,
                       xml::escape_attribute(edge.id),
                       xml::escape_attribute(edge.from_junction),
                       xml::escape_attribute(edge.to_junction));
    if (edge.name) {
      out += fmt::format(" name=\"{}\"", xml::escape_attribute(*edge.name));
    }
    out += ">\n";
    for (const Lane& lane : edge.lanes) {
      out += fmt::format(
          "{}{}<lane id=\"{}\" index=\"{}\" speed=\"{}\" length=\"{}\" "
          "shape=\"{}\"/>\n",
          kIndent, kIndent, xml::escape_attribute(lane.id), lane.index,
          format_fixed(lane.speed), format_fixed(lane.length),
          format_polyline(lane.shape));
    }
    out += fmt::format("{}</edge>\n", kIndent);
  }
  for (const Junction& junction : net.junctions) {
    std::string inc;
    for (std::size_t i = 0; i < junction.incoming_lanes.size(); ++i) {
      if (i) inc.push_back(' ');
      inc += junction.incoming_lanes[i];
    }
    out += fmt::format(
        "{}<junction id=\"{}\" type=\"{}\" x=\"{}\" y=\"{}\" incLanes=\"{}\" "
        "shape=\"{}\"/>\n",
        kIndent, xml::escape_attribute(junction.id), node_kind_name(junction.kind),
        format_fixed(junction.pos.x), format_fixed(junction.pos.y),
        xml::escape_attribute(inc), format_polyline(junction.shape));
  }
  for (const Connection& connection : net.connections) {
    out += fmt::format(
        "{}<connection from=\"{}\" to=\"{}\" fromLane=\"{}\" toLane=\"{}\" "
        "dir=\"{}\"/>\n",
        kIndent, xml::escape_attribute(connection.from_edge),
        xml::escape_attribute(connection.to_edge), connection.from_lane,
        connection.to_lane, connection_dir_code(connection.dir));
  }
  out += "</net>\n";
  return out;
}

// --- trips ------------------------------------------------------------------

Fallible<std::vector<Trip>> parse_trips(const std::string& text) {
  PlainFileParser ctx;
  ctx.file_label = "trip file";
  const xml::ParseResult doc = xml::parse(text);
  if (!doc.ok()) {
    return make_diag(DiagCode::FormatError, "trips",
                     fmt::format("trips file is not well-formed XML (line {}): {}. "
                                 "Emit a single <trips> document",
                                 doc.error->line, doc.error->message));
  }
  if (doc.root->name != "trips") {
    return make_diag(DiagCode::FormatError, doc.root->name,
                     fmt::format("trips root element must be <trips>, found <{}>",
                                 doc.root->name));
  }
  std::vector<Trip> trips;
  std::set<std::string> seen;
  for (const auto& item : doc.root->children) {
    if (item.kind == xml::Item::Kind::comment) continue;
    if (item.kind == xml::Item::Kind::text) {
      ctx.error(DiagCode::FormatError, trim(item.text),
                fmt::format("trip file: stray text \"{}\" inside <trips>",
                            trim(item.text)));
      continue;
    }
    const xml::Element& el = item.element;
    if (el.name != "trip") {
      ctx.error(DiagCode::FormatError, el.name,
                fmt::format("trip file line {}: unexpected element <{}>; only "
                            "<trip> is allowed",
                            el.line, el.name));
      continue;
    }
    AttrReader attrs(el);
    Trip trip;
    const auto id = attrs.take("id");
    if (!id) {
      ctx.error(DiagCode::BadAttribute, "trip",
                fmt::format("trip file line {}: <trip> is missing required "
                            "attribute \"id\"",
                            el.line));
    } else {
      trip.vehicle_id = *id;
      ctx.check_identifier(trip.vehicle_id, el.line);
      if (!seen.insert(trip.vehicle_id).second) {
        ctx.error(DiagCode::DuplicateId, trip.vehicle_id,
                  fmt::format("trip file line {}: vehicle id \"{}\" is used more "
                              "than once",
                              el.line, trip.vehicle_id));
      }
    }
    const std::string owner = trip.vehicle_id.empty() ? "trip" : trip.vehicle_id;
    if (const auto type = attrs.take("type")) {
      const auto kind = vehicle_kind_from(*type);
      if (!kind) {
        ctx.error(DiagCode::BadAttribute, owner,
                  fmt::format("trip file line {}: trip \"{}\" type must be AV or "
                              "BV, found \"{}\"",
                              el.line, owner, *type));
      } else {
        trip.kind = *kind;
      }
    } else {
      ctx.error(DiagCode::BadAttribute, owner,
                fmt::format("trip file line {}: trip \"{}\" is missing required "
                            "attribute \"type\"",
                            el.line, owner));
    }
    for (const auto* field : {"from", "to"}) {
      const auto value = attrs.take(field);
      if (!value) {
        ctx.error(DiagCode::BadAttribute, owner,
                  fmt::format("trip file line {}: trip \"{}\" is missing required "
                              "attribute \"{}\"",
                              el.line, owner, field));
        continue;
      }
      (std::string_view(field) == "from" ? trip.depart_edge : trip.arrive_edge) =
          *value;
    }
    if (const auto depart = ctx.number(el, attrs, "depart", true, owner)) {
      if (*depart < 0.0) {
        ctx.error(DiagCode::BadAttribute, owner,
                  fmt::format("trip file line {}: trip \"{}\" depart time must be "
                              ">= 0",
                              el.line, owner));
      } else {
        trip.depart_time = *depart;
      }
    }
    ctx.flag_unknown(el, attrs, owner);
    trips.push_back(std::move(trip));
  }
  if (!ctx.diags.empty()) return ctx.diags;
  return trips;
}

std::string serialize_trips(const std::vector<Trip>& trips) {
  if (trips.empty()) return "<trips/>\n";
  std::string out = "<trips>\n";
  for (const Trip& trip : trips) {
    out += fmt::format(
        "{}<trip id=\"{}\" type=\"{}\" from=\"{}\" to=\"{}\" depart=\"{}\"/>\n",
        kIndent, xml::escape_attribute(trip.vehicle_id), vehicle_kind_name(trip.kind),
        xml::escape_attribute(trip.depart_edge),
        xml::escape_attribute(trip.arrive_edge), format_fixed(trip.depart_time));
  }
  out += "</trips>\n";
  return out;
}

// --- routes -----------------------------------------------------------------

Fallible<std::vector<Route>> parse_routes(const std::string& text) {
  const xml::ParseResult doc = xml::parse(text);
  if (!doc.ok()) {
    return make_diag(DiagCode::FormatError, "routes",
                     fmt::format("route file is not well-formed XML (line {}): {}",
                                 doc.error->line, doc.error->message));
  }
  if (doc.root->name != "routes") {
    return make_diag(DiagCode::FormatError, doc.root->name,
                     fmt::format("route file root element must be <routes>, found "
                                 "<{}>",
                                 doc.root->name));
  }
  Diagnostics diags;
  std::vector<Route> routes;
  std::set<std::string> seen;
  for (const xml::Element* el : doc.root->child_elements()) {
    if (el->name == "vType") continue;  // fixed AV/BV presets, nothing to read
    if (el->name != "vehicle") {
      diags.push_back(make_diag(
          DiagCode::FormatError, el->name,
          fmt::format("route file line {}: unexpected element <{}>", el->line,
                      el->name)));
      continue;
    }
    Route route;
    const auto id = el->attribute("id");
    const auto type = el->attribute("type");
    const auto depart = el->attribute("depart");
    if (!id || !type || !depart) {
      diags.push_back(make_diag(
          DiagCode::BadAttribute, id.value_or("vehicle"),
          fmt::format("route file line {}: <vehicle> \"{}\" needs id, type and "
                      "depart",
                      el->line, id.value_or("vehicle"))));
      continue;
    }
    route.vehicle_id = *id;
    if (!seen.insert(route.vehicle_id).second) {
      diags.push_back(make_diag(
          DiagCode::DuplicateId, route.vehicle_id,
          fmt::format("route file: vehicle id \"{}\" is used more than once",
                      route.vehicle_id)));
    }
    if (const auto kind = vehicle_kind_from(*type)) {
      route.kind = *kind;
    } else {
      diags.push_back(make_diag(
          DiagCode::BadAttribute, route.vehicle_id,
          fmt::format("vehicle \"{}\" type must be AV or BV", route.vehicle_id)));
    }
    const auto depart_value = parse_double(*depart);
    if (!depart_value || *depart_value < 0.0) {
      diags.push_back(make_diag(
          DiagCode::BadAttribute, route.vehicle_id,
          fmt::format("vehicle \"{}\" depart must be a number >= 0",
                      route.vehicle_id)));
    } else {
      route.depart_time = *depart_value;
    }
    const auto children = el->child_elements();
    if (children.size() != 1 || children[0]->name != "route" ||
        !children[0]->attribute("edges")) {
      diags.push_back(make_diag(
          DiagCode::FormatError, route.vehicle_id,
          fmt::format("vehicle \"{}\" must contain exactly one <route edges=...>",
                      route.vehicle_id)));
      continue;
    }
    for (const std::string& edge : split(*children[0]->attribute("edges"), ' ')) {
      if (!edge.empty()) route.edges.push_back(edge);
    }
    if (route.edges.empty()) {
      diags.push_back(make_diag(
          DiagCode::FormatError, route.vehicle_id,
          fmt::format("vehicle \"{}\" has an empty edge list", route.vehicle_id)));
      continue;
    }
    routes.push_back(std::move(route));
  }
  if (!diags.empty()) return diags;
  return routes;
}

std::string serialize_routes(const std::vector<Route>& routes) {
  std::string out = "<routes>\n";
  out += fmt::format(
      "{}<vType id=\"AV\" accel=\"2.00\" decel=\"3.00\" length=\"5.00\" "
      "maxSpeed=\"55.56\"/>\n",
      kIndent);
  out += fmt::format(
      "{}<vType id=\"BV\" accel=\"2.00\" decel=\"3.00\" length=\"5.00\" "
      "maxSpeed=\"55.56\"/>\n",
      kIndent);
  for (const Route& route : routes) {
    std::string edges;
    for (std::size_t i = 0; i < route.edges.size(); ++i) {
      if (i) edges.push_back(' ');
      edges += route.edges[i];
    }
    out += fmt::format("{}<vehicle id=\"{}\" type=\"{}\" depart=\"{}\">\n", kIndent,
                       xml::escape_attribute(route.vehicle_id),
                       vehicle_kind_name(route.kind), format_fixed(route.depart_time));
    out += fmt::format("{}{}<route edges=\"{}\"/>\n", kIndent, kIndent,
                       xml::escape_attribute(edges));
    out += fmt::format("{}</vehicle>\n", kIndent);
  }
  out += "</routes>\n";
  return out;
}

std::string serialize_sumocfg(const std::string& net_file,
                              const std::string& route_file, double begin,
                              double end) {
  std::string out = "<configuration>\n";
  out += fmt::format("{}<input>\n", kIndent);
  out += fmt::format("{}{}<net-file value=\"{}\"/>\n", kIndent, kIndent,
                     xml::escape_attribute(net_file));
  out += fmt::format("{}{}<route-files value=\"{}\"/>\n", kIndent, kIndent,
                     xml::escape_attribute(route_file));
  out += fmt::format("{}</input>\n", kIndent);
  out += fmt::format("{}<time>\n", kIndent);
  out += fmt::format("{}{}<begin value=\"{}\"/>\n", kIndent, kIndent,
                     format_fixed(begin));
  out += fmt::format("{}{}<end value=\"{}\"/>\n", kIndent, kIndent,
                     format_fixed(end));
  out += fmt::format("{}</time>\n", kIndent);
  out += "</configuration>\n";
  return out;
}

NetworkStats network_stats(const CompiledNetwork& net) {
  NetworkStats stats;
  stats.total_edges = static_cast<long>(net.edges.size());
  for (const CompiledEdge& edge : net.edges) {
    stats.total_lanes += static_cast<long>(edge.lanes.size());
    stats.total_edge_length += edge.mean_lane_length();
  }
  return stats;
}

}  // namespace scenoforge
