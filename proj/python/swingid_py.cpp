#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "swingid/cli.hpp"
#include "swingid/eval.hpp"
#include "swingid/features.hpp"
#include "swingid/kinematics.hpp"
#include "swingid/mocap_io.hpp"
#include "swingid/pipeline.hpp"
#include "swingid/rbf.hpp"
#include "swingid/synthgen.hpp"

namespace py = pybind11;
using namespace swingid;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Path3 to_path(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw InvalidArgument("expected an (n, 3) array");
  Path3 p;
  const auto v = a.unchecked<2>();
  for (py::ssize_t i = 0; i < v.shape(0); ++i) p.emplace_back(v(i, 0), v(i, 1), v(i, 2));
  return p;
}

Array from_path(const Path3& p) {
  Array out({static_cast<py::ssize_t>(p.size()), py::ssize_t{3}});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (int k = 0; k < 3; ++k) v(i, k) = p[i][k];
  }
  return out;
}

Array frames_array(const mocap::SwingClip& clip) {
  Array out({static_cast<py::ssize_t>(clip.frame_count()),
             static_cast<py::ssize_t>(clip.marker_count()), py::ssize_t{3}});
  auto v = out.mutable_unchecked<3>();
  for (std::size_t t = 0; t < clip.frame_count(); ++t) {
    for (std::size_t m = 0; m < clip.marker_count(); ++m) {
      for (int k = 0; k < 3; ++k) v(t, m, k) = clip.frames[t][m][k];
    }
  }
  return out;
}

py::dict clip_dict(const mocap::SwingClip& clip) {
  py::dict d;
  d["clip_id"] = clip.clip_id;
  d["sample_rate_hz"] = clip.sample_rate_hz;
  d["markers"] = clip.markers;
  d["frames"] = frames_array(clip);
  return d;
}

std::vector<features::FeatureVector> to_features(const Array& x,
                                                 const std::vector<std::string>& ids) {
  if (x.ndim() != 2 || x.shape(1) != static_cast<py::ssize_t>(features::kFeatureCount)) {
    throw InvalidArgument("expected an (n, 12) feature matrix");
  }
  if (!ids.empty() && ids.size() != static_cast<std::size_t>(x.shape(0))) {
    throw InvalidArgument("ids and feature rows differ in length");
  }
  const auto v = x.unchecked<2>();
  std::vector<features::FeatureVector> out(v.shape(0));
  for (py::ssize_t i = 0; i < v.shape(0); ++i) {
    out[i].swing_id = ids.empty() ? "s" + std::to_string(i) : ids[i];
    for (std::size_t k = 0; k < features::kFeatureCount; ++k) out[i].values[k] = v(i, k);
  }
  return out;
}

Array features_array(const std::vector<features::FeatureVector>& rows) {
  Array out({static_cast<py::ssize_t>(rows.size()),
             static_cast<py::ssize_t>(features::kFeatureCount)});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < features::kFeatureCount; ++k) v(i, k) = rows[i].values[k];
  }
  return out;
}

// Accepts "good"/"bad" strings or truthy values (bad = 1).
std::vector<Label> to_labels(const py::iterable& y) {
  std::vector<Label> out;
  for (const auto& item : y) {
    if (py::isinstance<py::str>(item)) {
      out.push_back(parse_label(item.cast<std::string>()));
    } else {
      const int truth = PyObject_IsTrue(item.ptr());
      if (truth < 0) throw py::error_already_set();
      out.push_back(truth ? Label::bad : Label::good);
    }
  }
  return out;
}

rbf::TrainConfig make_config(int hidden_units, std::uint64_t seed, const std::string& widths,
                             const std::string& init, const std::string& solver, int max_epochs) {
  rbf::TrainConfig c;
  c.hidden_units = hidden_units;
  c.rng_seed = seed;
  c.width_heuristic = rbf::parse_width_heuristic(widths);
  c.center_init = rbf::parse_center_init(init);
  c.output_solver = rbf::parse_output_solver(solver);
  c.max_epochs = max_epochs;
  return c;
}

#define SWINGID_TRAIN_ARGS                                                              \
  py::arg("hidden_units") = 4, py::arg("seed") = 0, py::arg("widths") = "nearest-center", \
      py::arg("init") = "random-points", py::arg("solver") = "pseudo-inverse",           \
      py::arg("max_epochs") = 100

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tennis swing kinematics, features and RBF classification.";

  auto base = py::register_exception<Error>(m, "SwingidError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<kinematics::DegenerateGeometryError>(m, "DegenerateGeometryError",
                                                              base.ptr());
  py::register_exception<features::DegenerateFitError>(m, "DegenerateFitError", base.ptr());
  py::register_exception<mocap::MissingSampleError>(m, "MissingSampleError", base.ptr());
  py::register_exception<rbf::TrainingRefused>(m, "TrainingRefused", base.ptr());

  m.attr("FEATURE_COUNT") = features::kFeatureCount;
  m.def("feature_names", [] {
    const auto& n = features::feature_names();
    return std::vector<std::string>(n.begin(), n.end());
  });

  m.def(
      "parse_clip",
      [](const std::filesystem::path& path, const std::string& convention, double scale,
         double sample_rate_hz) {
        mocap::ClipReadOptions o;
        o.convention = mocap::parse_convention(convention);
        o.scale = scale;
        o.sample_rate_hz = sample_rate_hz;
        return clip_dict(mocap::parse_clip(path, o));
      },
      py::arg("path"), py::arg("convention") = "canonical", py::arg("scale") = 1.0,
      py::arg("sample_rate_hz") = 50.0,
      "Reads a clip CSV; frames come back as a (frames, markers, 3) array.");

  m.def(
      "convert_handedness",
      [](const Array& points, const std::string& convention) {
        const auto c = mocap::parse_convention(convention);
        Path3 p = to_path(points);
        for (auto& v : p) v = mocap::convert_handedness(v, c);
        return from_path(p);
      },
      py::arg("points"), py::arg("convention"));

  m.def(
      "circumcenter",
      [](const Vec3& a, const Vec3& b, const Vec3& c) {
        return Vec3(kinematics::circumcenter(a, b, c));
      },
      py::arg("a"), py::arg("b"), py::arg("c"));

  m.def(
      "sweet_spot",
      [](const Array& r1, const Array& r2, const Array& handle, const std::string& method) {
        return from_path(kinematics::compute_sweet_spot(to_path(r1), to_path(r2), to_path(handle),
                                                        kinematics::parse_sweet_spot_method(method))
                             .positions);
      },
      py::arg("r1"), py::arg("r2"), py::arg("handle"), py::arg("method") = "circumcenter");

  m.def(
      "gradient_flow",
      [](const Array& positions) { return from_path(kinematics::finite_gradient(to_path(positions))); },
      py::arg("positions"));

  m.def(
      "vector_tips",
      [](const Array& positions, const Array& vectors) {
        return from_path(kinematics::compute_vector_tips({to_path(positions)}, {to_path(vectors)}).tips);
      },
      py::arg("positions"), py::arg("vectors"));

  m.def(
      "poly_fit2",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        if (a.size() != b.size()) throw InvalidArgument("a and b differ in length");
        std::vector<features::PlanePoint> pts;
        for (std::size_t i = 0; i < a.size(); ++i) pts.push_back({a[i], b[i]});
        const auto f = features::poly_fit2(pts);
        return py::make_tuple(f.p2, f.p1, f.p0);
      },
      py::arg("a"), py::arg("b"), "Least-squares quadratic; returns (p2, p1, p0).");

  m.def(
      "assemble_features",
      [](const Array& positions, const Array& tips) {
        const auto f = features::assemble_features({to_path(positions)}, {to_path(tips)});
        return Eigen::VectorXd(rbf::to_eigen(f));
      },
      py::arg("positions"), py::arg("tips"));

  m.def(
      "extract",
      [](const std::filesystem::path& clip_path, std::size_t start, std::size_t end,
         const std::string& convention, double scale, const std::string& method) {
        mocap::ClipReadOptions o;
        o.convention = mocap::parse_convention(convention);
        o.scale = scale;
        const auto clip = mocap::parse_clip(clip_path, o);
        const auto f = pipeline::extract_swing(clip, {clip.clip_id, start, end},
                                               kinematics::parse_sweet_spot_method(method));
        return Eigen::VectorXd(rbf::to_eigen(f));
      },
      py::arg("clip_path"), py::arg("start"), py::arg("end"), py::arg("convention") = "canonical",
      py::arg("scale") = 1.0, py::arg("method") = "circumcenter",
      "Feature vector of one swing, frames start..end inclusive.");

  m.def(
      "reduction",
      [](int duration, int markers) {
        const auto r = features::reduction_report(duration, markers);
        py::dict d;
        d["input_dim"] = r.input_dim;
        d["output_dim"] = r.output_dim;
        d["reduction_percent"] = r.reduction_percent;
        d["text"] = r.reduction_text();
        return d;
      },
      py::arg("duration"), py::arg("markers") = 22);

  m.def(
      "load_features",
      [](const std::filesystem::path& path) {
        const auto rows = features::load_features(path);
        std::vector<std::string> ids;
        for (const auto& r : rows) ids.push_back(r.swing_id);
        return py::make_tuple(ids, features_array(rows));
      },
      py::arg("path"), "Returns (ids, (n, 12) array).");

  m.def(
      "load_labels",
      [](const std::filesystem::path& path, const std::string& criterion) {
        const auto map = mocap::labels_for(mocap::load_labels(path), criterion);
        std::map<std::string, std::string> out;
        for (const auto& [id, label] : map) out[id] = std::string(to_string(label));
        return out;
      },
      py::arg("path"), py::arg("criterion"));

  m.def(
      "train",
      [](const Array& x, const py::iterable& y, int hidden_units, std::uint64_t seed,
         const std::string& widths, const std::string& init, const std::string& solver,
         int max_epochs) {
        const auto rows = to_features(x, {});
        const auto labels = to_labels(y);
        const auto model =
            rbf::train(rows, labels, make_config(hidden_units, seed, widths, init, solver, max_epochs));
        return rbf::to_json(model).dump();
      },
      py::arg("x"), py::arg("y"), SWINGID_TRAIN_ARGS, "Trains a model; returns its JSON text.");

  m.def(
      "predict",
      [](const std::string& model_json, const Array& x) {
        const auto model = rbf::model_from_json(nlohmann::json::parse(model_json));
        const auto rows = to_features(x, {});
        Eigen::VectorXd scores(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) scores[i] = rbf::predict(model, rows[i]);
        return scores;
      },
      py::arg("model_json"), py::arg("x"), "Raw scores; >= 0.5 means bad.");

  m.def(
      "loocv",
      [](const Array& x, const py::iterable& y, const std::vector<std::string>& ids, int repeats,
         int hidden_units, std::uint64_t seed, const std::string& widths, const std::string& init,
         const std::string& solver, int max_epochs) {
        eval::LabeledSet data{to_features(x, ids), to_labels(y)};
        const auto cfg = make_config(hidden_units, seed, widths, init, solver, max_epochs);
        return eval::to_json(eval::repeat_loocv(data, cfg, repeats, seed)).dump();
      },
      py::arg("x"), py::arg("y"), py::arg("ids") = std::vector<std::string>{},
      py::arg("repeats") = 1, SWINGID_TRAIN_ARGS,
      "Repeated leave-one-out validation; returns the report JSON text.");

  m.def("accuracy", [](const std::vector<int>& errors) { return eval::accuracy(errors); },
        py::arg("errors"));
  m.def("format_percent", &eval::format_percent, py::arg("percent"));

  m.def(
      "random_swing",
      [](std::uint64_t seed, double noise) {
        auto a = synth::random_archetype(seed);
        a.noise_amplitude = noise;
        const auto s = synth::generate_swing(a, seed, "swing");
        py::dict d = clip_dict(s.clip);
        d["roi"] = py::make_tuple(s.roi.start_frame, s.roi.end_frame);
        d["sweet_spot"] = from_path(s.sweet_spot);
        d["sagittal"] = py::make_tuple(a.sagittal.p2, a.sagittal.p1, a.sagittal.p0);
        d["transverse"] = py::make_tuple(a.transverse.p2, a.transverse.p1, a.transverse.p0);
        return d;
      },
      py::arg("seed"), py::arg("noise") = 0.0);

  m.def(
      "synth_dataset",
      [](const std::filesystem::path& out_dir, std::uint64_t seed, const std::string& preset) {
        std::vector<synth::DatasetEntry> entries;
        if (preset == "default") {
          entries = synth::default_preset();
        } else if (preset == "separable") {
          entries = synth::separable_preset();
        } else {
          throw InvalidArgument("unknown preset: " + preset);
        }
        const auto f = synth::generate_dataset(entries, seed, out_dir);
        py::dict d;
        d["clips_dir"] = f.clips_dir;
        d["rois"] = f.rois;
        d["labels"] = f.labels;
        d["manifest"] = f.manifest;
        return d;
      },
      py::arg("out_dir"), py::arg("seed") = 0, py::arg("preset") = "default");

  m.def(
      "viewer_bundle",
      [](const std::filesystem::path& clip_path, std::size_t start, std::size_t end,
         const std::optional<std::filesystem::path>& labels_path) {
        const auto clip = mocap::parse_clip(clip_path);
        std::vector<mocap::LabelRecord> labels;
        if (labels_path) {
          for (const auto& r : mocap::load_labels(*labels_path)) {
            if (r.clip_id == clip.clip_id) labels.push_back(r);
          }
        }
        return pipeline::viewer_bundle(clip, {clip.clip_id, start, end}, labels).dump();
      },
      py::arg("clip_path"), py::arg("start"), py::arg("end"), py::arg("labels_path") = py::none(),
      "Viewer bundle JSON text for one clip.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a command line (without the program name); returns (code, stdout, stderr).");
}
