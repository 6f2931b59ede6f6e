#include "osa/cli/json_writer.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "osa/format.hpp"

namespace osa::cli {
namespace {

void indent(std::ostream& out, int depth) {
  for (int i = 0; i < depth; ++i) out << "  ";
}

void emit(std::ostream& out, const Json& v, int depth) {
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out << ",\n";
        first = false;
        indent(out, depth + 1);
        out << Json(key).dump() << ": ";
        emit(out, item, depth + 1);
      }
      out << '\n';
      indent(out, depth);
      out << '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out << "[]";
        return;
      }
      // Scalar arrays stay on one line.
      const bool flat = std::all_of(v.begin(), v.end(),
                                    [](const Json& x) { return x.is_primitive(); });
      out << '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) out << (flat ? ", " : ",");
        first = false;
        if (!flat) {
          out << '\n';
          indent(out, depth + 1);
        }
        emit(out, item, depth + 1);
      }
      if (!flat) {
        out << '\n';
        indent(out, depth);
      }
      out << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      out << (std::isfinite(x) ? format_double(x) : std::string("null"));
      return;
    }
    default:
      out << v.dump();
  }
}

}  // namespace

void write_json(std::ostream& out, const Json& doc) {
  emit(out, doc, 0);
  out << '\n';
}

}  // namespace osa::cli
