#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fctgan/cli/cli.hpp"
#include "fctgan/evaluation/report.hpp"
#include "fctgan/training/checkpoint.hpp"
#include "fctgan/training/gradcheck_suite.hpp"

namespace py = pybind11;
using namespace fctgan;

namespace {

Table table_from_columns(const std::vector<py::array_t<double, py::array::forcecast>>& cols) {
  Table t;
  for (const auto& c : cols) {
    if (c.ndim() != 1) throw std::invalid_argument("table columns must be one-dimensional");
    t.columns.emplace_back(c.data(), c.data() + c.size());
  }
  if (!t.columns.empty()) {
    for (const auto& c : t.columns) {
      if (c.size() != t.columns.front().size()) throw std::invalid_argument("table columns differ in length");
    }
  }
  return t;
}

py::list table_columns(const Table& t) {
  py::list out;
  for (const auto& c : t.columns) out.append(py::array_t<double>(static_cast<py::ssize_t>(c.size()), c.data()));
  return out;
}

std::optional<CondVector> condition(const AnyModel& model, const std::optional<std::pair<std::string, std::string>>& c) {
  if (!c) return std::nullopt;
  const auto& schema = model_transformer(model).schema();
  const auto col = schema.find(c->first);
  if (!col || !schema[*col].is_categorical()) throw std::invalid_argument("no categorical column '" + c->first + "'");
  const auto& vocab = schema[*col].vocabulary;
  const auto it = std::find(vocab.begin(), vocab.end(), c->second);
  if (it == vocab.end()) throw std::invalid_argument("'" + c->second + "' is not a category of '" + c->first + "'");
  return model_sampler(model).fixed(*col, static_cast<std::size_t>(it - vocab.begin()));
}

// std::variant has a pybind11 caster of its own, so the model is boxed.
struct PyModel {
  AnyModel model;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "FCT-GAN tabular synthesizer";

  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalFault>(m, "NumericalFault", PyExc_ArithmeticError);

  py::class_<TableSchema>(m, "Schema")
      .def_static("load", &load_schema, py::arg("path"))
      .def_static("from_json", [](const std::string& text) { return schema_from_json(nlohmann::json::parse(text)); })
      .def("to_json", [](const TableSchema& s) { return schema_to_json(s).dump(); })
      .def_property_readonly("names", [](const TableSchema& s) {
        std::vector<std::string> out;
        for (const auto& c : s.columns) out.push_back(c.name);
        return out;
      })
      .def("hash", &schema_hash)
      .def("__len__", &TableSchema::size);

  py::class_<Table>(m, "Table")
      .def(py::init(&table_from_columns), py::arg("columns"))
      .def_static("read_csv", &read_csv, py::arg("path"), py::arg("schema"))
      .def("write_csv", [](const Table& t, const std::string& path, const TableSchema& s) { write_csv(path, t, s); },
           py::arg("path"), py::arg("schema"))
      .def_property_readonly("columns", &table_columns)
      .def_property_readonly("rows", &Table::rows)
      .def("select_rows", &Table::select_rows, py::arg("indices"));

  py::class_<PyModel>(m, "Model")
      .def_static("load", [](const std::string& path) { return PyModel{load_checkpoint(path)}; }, py::arg("path"))
      .def("save", [](const PyModel& m, const std::string& path) { save_checkpoint(path, m.model); }, py::arg("path"))
      .def(
          "sample",
          [](const PyModel& m, std::size_t n, std::uint64_t seed,
             std::optional<std::pair<std::string, std::string>> cond) {
            Rng rng(seed);
            return sample(m.model, n, rng, condition(m.model, cond));
          },
          py::arg("n"), py::arg("seed") = 0, py::arg("condition") = std::nullopt)
      .def_property_readonly("schema", [](const PyModel& m) { return model_transformer(m.model).schema(); })
      .def_property_readonly("config",
                             [](const PyModel& m) { return train_config_to_json(model_config(m.model)).dump(); })
      .def_property_readonly("train_rows", [](const PyModel& m) { return model_train_rows(m.model); });

  m.def(
      "train",
      [](const Table& data, const TableSchema& schema, const std::string& config) {
        const auto c = train_config_from_json(nlohmann::json::parse(config));
        py::gil_scoped_release release;
        auto result = train(data, schema, c);
        return std::make_pair(PyModel{std::move(result.model)}, cli::history_jsonl(result.history));
      },
      py::arg("data"), py::arg("schema"), py::arg("config") = "{}");

  m.def(
      "evaluate",
      [](const Table& real, const Table& synth, const TableSchema& schema, const Table* test, std::uint64_t seed) {
        return report_to_json(evaluate(real, synth, schema, test, seed)).dump();
      },
      py::arg("real"), py::arg("synth"), py::arg("schema"), py::arg("test") = nullptr, py::arg("seed") = 0);

  m.def("gradcheck", [](std::uint64_t seed) {
    std::vector<std::tuple<std::string, double, double, bool>> out;
    for (const auto& r : full_gradcheck_suite(seed)) out.emplace_back(r.name, r.max_rel_error, r.tolerance, r.passed());
    return out;
  }, py::arg("seed") = 7);

  m.def("plan_resolution", [](std::size_t d_enc, std::size_t d_cv, std::size_t h0) {
    const auto p = plan_resolution(d_enc, d_cv, h0);
    return py::dict(py::arg("side") = p.side, py::arg("stages") = p.stages, py::arg("gen_pad") = p.gen_pad,
                    py::arg("disc_pad") = p.disc_pad);
  }, py::arg("d_enc"), py::arg("d_cv"), py::arg("h0") = 4);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = cli::run(args, out, err);
    }
    return std::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
