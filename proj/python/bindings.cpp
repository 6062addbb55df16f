#include "handover/cli.hpp"
#include "handover/harness.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace handover;

namespace {

py::tuple index_tuple(const Index3& i) { return py::make_tuple(i.x, i.y, i.z); }

Index3 to_index(const std::array<int, 3>& a) { return {a[0], a[1], a[2]}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Contact-aware robot-to-human handover planning";

  py::register_exception<Error>(m, "HandoverError", PyExc_RuntimeError);

  py::class_<voxelgeom::VoxelGrid>(m, "VoxelGrid")
      .def(py::init([](std::array<int, 3> dims, double voxel_size, Vec3 origin) {
             return voxelgeom::VoxelGrid(to_index(dims), voxel_size, origin);
           }),
           py::arg("dims"), py::arg("voxel_size"), py::arg("origin") = Vec3::Zero())
      .def_property_readonly("dims", [](const voxelgeom::VoxelGrid& g) { return index_tuple(g.dims()); })
      .def_property_readonly("voxel_size", &voxelgeom::VoxelGrid::voxel_size)
      .def_property_readonly("origin", &voxelgeom::VoxelGrid::origin)
      .def("occupied", [](const voxelgeom::VoxelGrid& g, std::array<int, 3> i) { return g.occupied(to_index(i)); })
      .def("set", [](voxelgeom::VoxelGrid& g, std::array<int, 3> i, bool v) { g.set(to_index(i), v); })
      .def("center", [](const voxelgeom::VoxelGrid& g, std::array<int, 3> i) { return g.center(to_index(i)); })
      .def("occupied_count", &voxelgeom::VoxelGrid::occupied_count)
      .def("surface_voxels",
           [](const voxelgeom::VoxelGrid& g) {
             py::list out;
             for (const auto& i : voxelgeom::surface_voxels(g)) out.append(index_tuple(i));
             return out;
           })
      .def("__eq__", [](const voxelgeom::VoxelGrid& a, const voxelgeom::VoxelGrid& b) { return a == b; });

  m.def("voxelize_obj",
        [](const std::string& path, std::array<int, 3> dims, double padding) {
          return voxelgeom::voxelize_mesh(voxelgeom::load_obj(path), to_index(dims), padding);
        },
        py::arg("path"), py::arg("dims") = std::array<int, 3>{64, 64, 64}, py::arg("padding") = 0.05);
  m.def("load_vgrid", &voxelgeom::load_vgrid, py::arg("path"));
  m.def("save_vgrid", &voxelgeom::save_vgrid, py::arg("path"), py::arg("grid"));

  py::class_<harness::Scene>(m, "Scene")
      .def_readonly("name", &harness::Scene::name)
      .def_readonly("grid", &harness::Scene::grid)
      .def_property_readonly("contact_map_count", [](const harness::Scene& s) { return s.contact_maps.size(); })
      .def("set_param", [](harness::Scene& s, const std::string& k, const std::string& v) { s.params.set(k, v); })
      .def("to_json", [](const harness::Scene& s) { return harness::scene_to_json(s).dump(); });

  m.def("load_scene", &harness::load_scene, py::arg("path"));
  m.def("make_suite_scene", &harness::make_suite_scene, py::arg("name"));
  m.def("suite_object_names", &harness::suite_object_names);
  m.def("save_scene", &harness::save_scene, py::arg("scene"), py::arg("directory"));

  m.def("run_pipeline_json",
        [](const harness::Scene& s, const std::string& mode, std::uint64_t seed) {
          harness::HandoverReport r;
          {
            py::gil_scoped_release release;
            r = harness::run_pipeline(s, harness::parse_mode(mode), seed);
          }
          return harness::report_to_json(r).dump();
        },
        py::arg("scene"), py::arg("mode") = "FULL", py::arg("seed") = 0);

  m.def("aggregate_json",
        [](const std::vector<std::string>& reports) {
          std::vector<harness::HandoverReport> parsed;
          for (const auto& r : reports) parsed.push_back(harness::report_from_json(nlohmann::json::parse(r)));
          const auto summary = harness::aggregate(parsed);
          std::ostringstream csv;
          harness::write_summary_csv(csv, summary);
          return py::make_tuple(csv.str(), harness::summary_to_json(summary).dump());
        },
        py::arg("reports"));

  m.def("contact_score", &grasping::contact_score, py::arg("confidence"), py::arg("occlusion"), py::arg("lam"));
  m.def("success", [](std::vector<double> v, std::vector<double> r, double k) { return metrics::success(v, r, k); },
        py::arg("visibility"), py::arg("reachability"), py::arg("k") = metrics::kDefaultSuccessThreshold);
  m.def("lower_median", &metrics::lower_median, py::arg("values"));

  m.def("plan_handover_position",
        [](double height, double mass, double alpha) {
          const auto plan = ergonomics::plan_handover_position(ergonomics::HumanModel::standard(height), mass, alpha);
          py::dict d;
          d["position"] = plan.position;
          d["shoulder_deg"] = plan.winner.config.shoulder_deg;
          d["elbow_deg"] = plan.winner.config.elbow_deg;
          d["f_torque"] = plan.winner.f_torque;
          d["f_disp"] = plan.winner.f_disp;
          d["f_total"] = plan.winner.f_total;
          d["candidates"] = plan.candidates.size();
          return d;
        },
        py::arg("height") = 1.7, py::arg("object_mass") = ergonomics::kDefaultObjectMass,
        py::arg("alpha") = ergonomics::kDefaultAlpha);

  m.def("orientation_sample_count",
        [](double granularity) { return delivery::sample_orientations(granularity).size(); },
        py::arg("granularity_deg") = 45.0);

  m.def("cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = cli::run(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
