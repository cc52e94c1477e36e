#include "isolump/geometry_io.hpp"

#include "isolump/error.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>

namespace isolump {

using nlohmann::json;

void write_geometry(std::ostream& out, const MultipatchGeometry& geometry) {
  json doc;
  doc["patches"] = json::array();
  for (const auto& patch : geometry.patches) {
    json jp;
    jp["degrees"] = json::array();
    jp["knots"] = json::array();
    for (const auto& kv : patch.directions()) {
      jp["degrees"].push_back(kv.degree());
      jp["knots"].push_back(kv.knots());
    }
    jp["control_points"] = json::array();
    const auto& cp = patch.control_points();
    for (Index i = 0; i < cp.rows(); ++i) {
      json row = json::array();
      for (Index j = 0; j < cp.cols(); ++j) row.push_back(cp(i, j));
      jp["control_points"].push_back(row);
    }
    if (patch.rational()) {
      jp["weights"] = std::vector<double>(patch.weights().data(), patch.weights().data() + patch.weights().size());
    }
    doc["patches"].push_back(jp);
  }
  doc["interfaces"] = json::array();
  for (const auto& itf : geometry.interfaces) {
    doc["interfaces"].push_back({{"patch_a", itf.patch_a},
                                 {"face_a", itf.face_a},
                                 {"patch_b", itf.patch_b},
                                 {"face_b", itf.face_b},
                                 {"swap", itf.orientation.swap},
                                 {"flip", {itf.orientation.flip[0], itf.orientation.flip[1]}}});
  }
  doc["dirichlet"] = json::array();
  for (const auto& mask : geometry.dirichlet) doc["dirichlet"].push_back(std::vector<bool>(mask));
  out << std::setprecision(17) << doc.dump(2) << '\n';
}

MultipatchGeometry read_geometry(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, std::string("cannot parse geometry: ") + e.what());
  }
  MultipatchGeometry g;
  try {
    for (const auto& jp : doc.at("patches")) {
      const auto degrees = jp.at("degrees").get<std::vector<int>>();
      const auto knots = jp.at("knots").get<std::vector<std::vector<double>>>();
      require(degrees.size() == knots.size(), ErrorKind::io, "degrees and knots differ in length");
      std::vector<KnotVector> dirs;
      for (std::size_t l = 0; l < degrees.size(); ++l) dirs.emplace_back(knots[l], degrees[l]);
      const auto pts = jp.at("control_points").get<std::vector<std::vector<double>>>();
      require(!pts.empty(), ErrorKind::io, "patch without control points");
      DenseMatrix cp(static_cast<Index>(pts.size()), static_cast<Index>(pts.front().size()));
      for (std::size_t i = 0; i < pts.size(); ++i) {
        require(pts[i].size() == pts.front().size(), ErrorKind::io, "ragged control point array");
        for (std::size_t j = 0; j < pts[i].size(); ++j) cp(static_cast<Index>(i), static_cast<Index>(j)) = pts[i][j];
      }
      Vector w;
      if (jp.contains("weights")) {
        const auto wv = jp.at("weights").get<std::vector<double>>();
        w = Eigen::Map<const Vector>(wv.data(), static_cast<Index>(wv.size()));
      }
      g.patches.emplace_back(std::move(dirs), std::move(cp), std::move(w));
    }
    if (doc.contains("interfaces")) {
      for (const auto& ji : doc.at("interfaces")) {
        Interface itf;
        itf.patch_a = ji.at("patch_a").get<int>();
        itf.face_a = ji.at("face_a").get<int>();
        itf.patch_b = ji.at("patch_b").get<int>();
        itf.face_b = ji.at("face_b").get<int>();
        itf.orientation.swap = ji.value("swap", false);
        if (ji.contains("flip")) {
          const auto f = ji.at("flip").get<std::vector<bool>>();
          for (std::size_t j = 0; j < f.size() && j < 2; ++j) itf.orientation.flip[j] = f[j];
        }
        g.interfaces.push_back(itf);
      }
    }
    if (doc.contains("dirichlet")) {
      for (const auto& jm : doc.at("dirichlet")) g.dirichlet.push_back(jm.get<std::vector<bool>>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, std::string("malformed geometry: ") + e.what());
  }
  return g;
}

void save_geometry(const std::string& path, const MultipatchGeometry& geometry) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open '" + path + "' for writing");
  write_geometry(out, geometry);
}

MultipatchGeometry load_geometry(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open '" + path + "'");
  return read_geometry(in);
}

}  // namespace isolump
