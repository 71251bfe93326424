#include "fbms/mesh_io.hpp"

#include "fbms/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace fbms {

namespace {

std::string strip(const std::string& line) {
  std::string s = line.substr(0, line.find('#'));
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::ifstream open_input(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::FileNotFound, "file not found: " + path.string());
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open: " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write: " + path.string());
  return out;
}

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
  throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + what);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

TriSurfaceMesh read_mesh(std::istream& in) {
  std::vector<Vec3> vertices;
  std::vector<Tri> triangles;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = strip(line);
    if (s.empty()) continue;
    std::istringstream ls(s);
    std::string tag;
    ls >> tag;
    if (!header) {
      int version = 0;
      if (tag != "FBMS-MESH" || !(ls >> version) || version != 1) {
        parse_fail(line_no, "expected header 'FBMS-MESH 1'");
      }
      header = true;
      continue;
    }
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) parse_fail(line_no, "malformed vertex");
      vertices.push_back(p);
    } else if (tag == "f") {
      Tri t;
      if (!(ls >> t[0] >> t[1] >> t[2])) parse_fail(line_no, "malformed face");
      triangles.push_back(t);
    } else {
      parse_fail(line_no, "unknown record '" + tag + "'");
    }
    std::string extra;
    if (ls >> extra) parse_fail(line_no, "trailing tokens");
  }
  if (!header) parse_fail(line_no, "missing header");
  return build_mesh(std::move(vertices), std::move(triangles));
}

TriSurfaceMesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const TriSurfaceMesh& mesh) {
  out << "FBMS-MESH 1\n";
  for (const Vec3& p : mesh.vertices()) {
    out << "v " << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
        << format_double(p.z()) << '\n';
  }
  for (const Tri& t : mesh.triangles()) out << "f " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_mesh(const std::filesystem::path& path, const TriSurfaceMesh& mesh) {
  std::ofstream out = open_output(path);
  write_mesh(out, mesh);
}

std::vector<double> read_field(std::istream& in) {
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = strip(line);
    if (s.empty()) continue;
    std::istringstream ls(s);
    std::string tag;
    ls >> tag;
    if (!header) {
      int version = 0;
      if (tag != "FBMS-FIELD" || !(ls >> version) || version != 1) {
        parse_fail(line_no, "expected header 'FBMS-FIELD 1'");
      }
      header = true;
      continue;
    }
    double x = 0.0;
    if (tag != "s" || !(ls >> x)) parse_fail(line_no, "expected 's value'");
    values.push_back(x);
  }
  if (!header) parse_fail(line_no, "missing header");
  return values;
}

std::vector<double> read_field(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_field(in);
}

void write_field(std::ostream& out, const std::vector<double>& values) {
  out << "FBMS-FIELD 1\n";
  for (double x : values) out << "s " << format_double(x) << '\n';
}

void write_field(const std::filesystem::path& path, const std::vector<double>& values) {
  std::ofstream out = open_output(path);
  write_field(out, values);
}

}  // namespace fbms
