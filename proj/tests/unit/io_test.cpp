#include "mlpsens/error.hpp"
#include "mlpsens/io.hpp"
#include "mlpsens/jacobian.hpp"
#include "mlpsens/measures.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace mlpsens;

namespace {

const char* kAffineModel = R"({
  "schema_version": "1",
  "input_names": ["x"],
  "output_names": ["y"],
  "structure": [1, 1],
  "activations": [{"kind": "linear"}],
  "weights": [[[1.0], [2.0]]]
})";

std::string parse_error(std::string_view doc) {
  try {
    load_model(doc);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST(ModelFile, LoadAffine) {
  const NetworkSpec net = load_model(kAffineModel);
  EXPECT_EQ(net.input_names, std::vector<std::string>{"x"});
  EXPECT_DOUBLE_EQ(predict(net, Eigen::MatrixXd::Constant(1, 1, 3.0))(0, 0), 7.0);
}

TEST(ModelFile, RoundTripRandomNetworks) {
  Rng rng(61);
  for (int t = 0; t < 30; ++t) {
    NetworkSpec net = oracle::random_smooth_network(rng);
    if (t % 3 == 0) {
      net.layers[0].activation = ActivationKind::make(t % 2 ? Activation::prelu : Activation::elu, 0.3);
    }
    if (t % 4 == 0) {
      InputStandardization s;
      for (Index i = 0; i < net.input_width(); ++i) {
        s.means.push_back(rng.normal());
        s.sds.push_back(rng.uniform(0.1, 3));
      }
      net.input_standardization = s;
    }
    const std::string doc = save_model(net);
    const NetworkSpec back = load_model(doc);
    EXPECT_EQ(back, net);
    EXPECT_EQ(save_model(back), doc);
  }
}

TEST(ModelFile, SaveOfLoadPreservesDocument) {
  const std::string doc = save_model(load_model(kAffineModel));
  EXPECT_EQ(save_model(load_model(doc)), doc);
  EXPECT_EQ(doc.substr(0, 26), "{\n  \"schema_version\": \"1\",");
}

TEST(ModelFile, StringWeightCitesPath) {
  const std::string doc = replace(kAffineModel, "[2.0]", "[\"2.0\"]");
  EXPECT_EQ(parse_error(doc), "weights[0][1][0]: expected a number");
}

TEST(ModelFile, Errors) {
  EXPECT_NE(parse_error(replace(kAffineModel, "\"1\"", "\"2\"")).find("schema_version"), std::string::npos);
  EXPECT_NE(parse_error(replace(kAffineModel, "[[[1.0], [2.0]]]", "[[[1.0]]]")).find("weights[0]"),
            std::string::npos);
  EXPECT_NE(parse_error(replace(kAffineModel, "\"linear\"", "\"gelu\"")).find("activations[0].kind"),
            std::string::npos);
  EXPECT_NE(parse_error(replace(kAffineModel, "\"structure\": [1, 1]", "\"structure\": [2, 1]"))
                .find("input_names"),
            std::string::npos);
  EXPECT_NE(parse_error("{not json").find("$"), std::string::npos);
  EXPECT_NE(parse_error("{}").find("schema_version"), std::string::npos);
  EXPECT_NE(parse_error(replace(kAffineModel, "[2.0]", "[1e999]")), "");
}

TEST(Csv, ParsesQuotesAndLineEndings) {
  const CsvTable t = parse_csv("a,\"b,c\",d\r\n1,\"x\"\"y\",3\r\n\r\n4,5,6\n");
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b,c", "d"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][1], "x\"y");
  EXPECT_EQ(t.rows[1][2], "6");
}

TEST(Dataset, ThreeRows) {
  const std::vector<std::string> in{"X1", "X2"}, out{"Y"};
  const Dataset d = load_dataset("X1,X2,Y\n1,2,3\n4,5,6\n7,8,9\n", in, out);
  EXPECT_EQ(d.rows(), 3);
  EXPECT_EQ(d.input_names(), in);
  EXPECT_EQ(d.output_names(), out);
  EXPECT_EQ(d.inputs()(2, 1), 8.0);
  EXPECT_EQ(d.outputs()(1, 0), 6.0);
}

TEST(Dataset, BlankCellNamesRowAndColumn) {
  const std::vector<std::string> in{"X1", "X2"}, out{"Y"};
  try {
    load_dataset("X1,X2,Y\n1,2,3\n4,,6\n", in, out);
    FAIL();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("\"X2\""), std::string::npos) << msg;
  }
}

TEST(Dataset, Errors) {
  const std::vector<std::string> in{"X1"}, out{"Y"};
  EXPECT_THROW(load_dataset("X1,Z\n1,2\n", in, out), ValidationError);
  EXPECT_THROW(load_dataset("X1,Y\n", in, out), ParseError);
  EXPECT_THROW(load_dataset("", in, out), ParseError);
  EXPECT_THROW(load_dataset("X1,Y\n1,abc\n", in, out), ParseError);
  EXPECT_THROW(load_dataset("X1,Y\n1,inf\n", in, out), ParseError);
  EXPECT_THROW(load_dataset("X1,Y\n1,nan\n", in, out), ParseError);
  EXPECT_THROW(load_dataset("X1,Y\n1\n", in, out), ParseError);
}

TEST(Dataset, IsoTimestamps) {
  const std::vector<std::string> in{"T"}, out{};
  const Dataset d = load_dataset("DATE,T\n2007-07-02,1\n2007-07-03T12:00:00Z,2\n", in, out, "DATE");
  ASSERT_TRUE(d.timestamp);
  EXPECT_TRUE(d.timestamp->calendar);
  EXPECT_DOUBLE_EQ(d.timestamp->values[0], 1183334400.0);
  EXPECT_DOUBLE_EQ(d.timestamp->values[1] - d.timestamp->values[0], 1.5 * 86400);
  EXPECT_EQ(format_iso8601(d.timestamp->values[0]), "2007-07-02");
  EXPECT_FALSE(parse_iso8601("2007-13-01"));
  EXPECT_FALSE(parse_iso8601("yesterday"));

  const Dataset n = load_dataset("t,T\n0.5,1\n1.5,2\n", in, out, "t");
  EXPECT_FALSE(n.timestamp->calendar);
  EXPECT_EQ(n.timestamp->values[1], 1.5);
}

TEST(Dataset, CsvRoundTrip) {
  Rng rng(62);
  Dataset d;
  d.column_names = {"a", "b", "c"};
  d.values = oracle::random_inputs(rng, 20, 3, 1e3);
  d.input_columns = {0, 2};
  d.output_columns = {1};
  const std::string csv = dataset_to_csv(d);
  const std::vector<std::string> in{"a", "c"}, out{"b"};
  const Dataset back = load_dataset(csv, in, out);
  EXPECT_EQ(back.inputs(), d.inputs());
  EXPECT_EQ(back.outputs(), d.outputs());
}

TEST(Export, SummaryCsv) {
  SensitivityTensor t(3, {"X1", "X2", "X3"}, {"Y"});
  for (Index n = 0; n < 3; ++n)
    for (Index i = 0; i < 3; ++i) t(n, i, 0) = static_cast<double>(n + i);
  const auto files = export_summary(summarize(t), ExportFormat::csv);
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0].name, "sensitivity_Y.csv");
  EXPECT_EQ(files[0].bytes,
            "varNames,mean,std,meanSensSQ\nX1,1,1,1.6666666666666667\nX2,2,1,4.666666666666667\n"
            "X3,3,1,9.666666666666666\n");
}

TEST(Export, PerOutputAndCombinedFiles) {
  SensitivityTensor t(2, {"a"}, {"setosa", "versicolor", "virginica"});
  const auto files = export_summary(combine(summarize(t)), ExportFormat::csv);
  std::vector<std::string> names;
  for (const auto& f : files) names.push_back(f.name);
  EXPECT_EQ(names, (std::vector<std::string>{"sensitivity_setosa.csv", "sensitivity_versicolor.csv",
                                             "sensitivity_virginica.csv", "sensitivity.csv"}));
  const auto json = export_summary(combine(summarize(t)), ExportFormat::structured_text);
  ASSERT_EQ(json.size(), 1u);
  EXPECT_EQ(json[0].name, "sensitivity.json");
}

TEST(Export, TensorLongForm) {
  SensitivityTensor t(2, {"a", "b"}, {"y"});
  t(1, 0, 0) = 0.5;
  EXPECT_EQ(export_tensor(t, ExportFormat::csv),
            "sample,input,output,value\n0,a,y,0\n0,b,y,0\n1,a,y,0.5\n1,b,y,0\n");
  EXPECT_EQ(export_tensor(SensitivityTensor(0, {"a"}, {"y"}), ExportFormat::csv),
            "sample,input,output,value\n");
}

TEST(Export, FormatSelector) {
  EXPECT_EQ(parse_export_format("csv"), ExportFormat::csv);
  EXPECT_EQ(parse_export_format("structured-text"), ExportFormat::structured_text);
  EXPECT_THROW(parse_export_format("xlsx"), ValidationError);
  EXPECT_EQ(format_number(std::nan("")), "NaN");
  EXPECT_EQ(format_number(0.1), "0.1");
}

TEST(Files, AtomicWriteAndMissingRead) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mlpsens_io_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_file_atomic(dir / "a.txt", "hello");
  EXPECT_EQ(read_file(dir / "a.txt"), "hello");
  write_file_atomic(dir / "a.txt", "bye");
  EXPECT_EQ(read_file(dir / "a.txt"), "bye");
  EXPECT_THROW(read_file(dir / "missing.txt"), IoError);
  EXPECT_THROW(write_file_atomic(dir / "no" / "such" / "dir.txt", "x"), IoError);
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);
  fs::remove_all(dir);
}
