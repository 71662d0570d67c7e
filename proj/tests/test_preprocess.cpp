#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <string>
#include <vector>

#include "mpict/preprocess.hpp"
#include "mpict/scanner.hpp"
#include "support/generators.hpp"

using namespace mpict;

namespace {

std::string data_file(const std::string& name) {
  return std::string(MPICT_TEST_DATA_DIR) + "/" + name;
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

SourceUnit unit_from(const std::string& text) {
  return make_source_unit("test", "test", text);
}

// Trailing whitespace per line does not survive reinsertion of calls whose
// original lines carried any; comparisons that allow it strip it.
std::string strip_trailing_ws(const std::string& text) {
  std::string out;
  for (const auto& line : split_lines(text)) {
    std::string_view v(line);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t'))
      v.remove_suffix(1);
    out += v;
    out += '\n';
  }
  if (!text.empty() && text.back() != '\n' && !out.empty()) out.pop_back();
  return out;
}

}  // namespace

TEST_CASE("the pi program strips to the figure's labels") {
  auto unit = unit_from(read_all(data_file("fig1a.c")));
  auto example = strip_and_label(unit, NumberingMode::Bare);

  REQUIRE(example.labels.size() == 5);
  CHECK(example.labels[0] == Label{6, "MPI_Init(&argc,&argv);"});
  CHECK(example.labels[1] == Label{7, "MPI_Comm_size(MPI_COMM_WORLD,&numprocs);"});
  CHECK(example.labels[2] == Label{8, "MPI_Comm_rank(MPI_COMM_WORLD,&rank);"});
  CHECK(example.labels[3] == Label{12, "MPI_Bcast(&n, 1, MPI_INT, 0, MPI_COMM_WORLD);"});
  CHECK(example.labels[4] == Label{18, "MPI_Finalize();"});
  CHECK(example.stripped_code.find("MPI_") == std::string::npos);
}

TEST_CASE("rendered tail lines byte-match the figure format") {
  auto unit = unit_from(read_all(data_file("fig1a.c")));
  auto example = strip_and_label(unit, NumberingMode::Bare);
  auto rendered = render_example(example);
  CHECK(rendered.find("(6, MPI_Init(&argc,&argv);)\n") != std::string::npos);
  CHECK(rendered.find("(7, MPI_Comm_size(MPI_COMM_WORLD,&numprocs);)\n") !=
        std::string::npos);
  CHECK(rendered.find("(8, MPI_Comm_rank(MPI_COMM_WORLD,&rank);)\n") !=
        std::string::npos);
  CHECK(rendered.find("(12, MPI_Bcast(&n, 1, MPI_INT, 0, MPI_COMM_WORLD);)\n") !=
        std::string::npos);
}

TEST_CASE("blank lines count: the blank line 5 pushes MPI_Init to line 6") {
  auto unit = unit_from(read_all(data_file("fig1a.c")));
  auto example = strip_and_label(unit);
  CHECK(example.labels.front().line == 6);
}

TEST_CASE("an MPI-free program is untouched") {
  auto unit = unit_from("int main() {\n  return 0;\n}\n");
  auto example = strip_and_label(unit);
  CHECK(example.labels.empty());
  CHECK(example.stripped_code == unit.text);
  CHECK(reinsert(example) == unit.text);
}

TEST_CASE("a two-line call shrinks the code by two lines") {
  const std::string text =
      "int main() {\n"
      "    int rc;\n"
      "    rc = MPI_Send(buf,\n"
      "      1, MPI_INT, 1, 0, MPI_COMM_WORLD);\n"
      "    return rc;\n"
      "}\n";
  auto example = strip_and_label(unit_from(text), NumberingMode::Bare);
  REQUIRE(example.labels.size() == 1);
  CHECK(example.labels[0].line == 3);
  CHECK(example.labels[0].call_text ==
        "rc = MPI_Send(buf, 1, MPI_INT, 1, 0, MPI_COMM_WORLD);");
  CHECK(count_lines(example.stripped_code) == count_lines(text) - 2);

  // Reinsertion restores a one-line version of the statement.
  auto restored = reinsert(example);
  CHECK(restored ==
        "int main() {\n"
        "    int rc;\n"
        "    rc = MPI_Send(buf, 1, MPI_INT, 1, 0, MPI_COMM_WORLD);\n"
        "    return rc;\n"
        "}\n");
}

TEST_CASE("embedded calls stay in the code and are reported") {
  Diagnostics diags;
  const std::string text =
      "int main() {\n"
      "    if (MPI_Init(&argc, &argv) != 0) { return 1; }\n"
      "    MPI_Finalize();\n"
      "    return 0;\n"
      "}\n";
  auto example = strip_and_label(unit_from(text), NumberingMode::Bare, &diags);
  REQUIRE(example.labels.size() == 1);
  CHECK(example.labels[0].call_text == "MPI_Finalize();");
  CHECK(example.stripped_code.find("MPI_Init") != std::string::npos);
  CHECK(diags.count("embedded-call") == 1);
}

TEST_CASE("labels refer to original line numbers") {
  auto unit = unit_from(read_all(data_file("fig1a.c")));
  auto example = strip_and_label(unit);
  auto sites = extract_mpi_calls(unit);
  REQUIRE(example.labels.size() == sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i)
    CHECK(example.labels[i].line == sites[i].start_line);
}

TEST_CASE("prefixed rendering numbers surviving lines with original numbers") {
  const std::string text = "x = 1;\nMPI_Barrier(c);\ny = 2;\n";
  auto example = strip_and_label(unit_from(text));
  auto rendered = render_example(example);
  CHECK(rendered ==
        "1| x = 1;\n"
        "3| y = 2;\n"
        "(2, MPI_Barrier(c);)\n");
}

TEST_CASE("parse_labels reads the figure tail line") {
  auto labels = parse_labels("(6, MPI_Init(&argc,&argv);)");
  REQUIRE(labels.size() == 1);
  CHECK(labels[0] == Label{6, "MPI_Init(&argc,&argv);"});
}

TEST_CASE("parse_labels on empty text") {
  CHECK(parse_labels("").empty());
}

TEST_CASE("parse_labels discards malformed label lines with a diagnostic") {
  Diagnostics diags;
  CHECK(parse_labels("(x, MPI_Init();)", &diags).empty());
  CHECK(diags.count("malformed-label") == 1);
}

TEST_CASE("parse_labels ignores surrounding code and sorts ascending") {
  const std::string text =
      "int main()\n"
      "{ done(); }\n"
      "(9, MPI_Finalize();)\n"
      "(6, MPI_Init(&argc,&argv);)\n";
  auto labels = parse_labels(text);
  REQUIRE(labels.size() == 2);
  CHECK(labels[0].line == 6);
  CHECK(labels[1].line == 9);
}

TEST_CASE("render and parse are inverse over generated examples") {
  testsupport::Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    auto program = testsupport::generate_mpi_program(rng, 1 + i % 20);
    for (auto mode : {NumberingMode::Bare, NumberingMode::Prefixed}) {
      auto example =
          strip_and_label(make_source_unit("p", "p", program.text), mode);
      auto parsed = parse_labels(render_example(example));
      REQUIRE(parsed == example.labels);
    }
  }
}

TEST_CASE("reinsert with no labels returns the stripped code") {
  TrainingExample example;
  example.stripped_code = "a\nb\n";
  CHECK(reinsert(example) == "a\nb\n");
}

TEST_CASE("labels past the end are appended with a diagnostic") {
  Diagnostics diags;
  TrainingExample example;
  example.stripped_code = "a\n";
  example.labels = {{9, "MPI_Finalize();"}};
  CHECK(reinsert(example, &diags) == "a\nMPI_Finalize();\n");
  CHECK(diags.count("label-beyond-end") == 1);
}

TEST_CASE("the pi program round-trips through strip and reinsert") {
  auto text = read_all(data_file("fig1a.c"));
  auto example = strip_and_label(unit_from(text), NumberingMode::Bare);
  CHECK(strip_trailing_ws(reinsert(example)) == strip_trailing_ws(text));
}

TEST_CASE("generated single-line programs round-trip byte-for-byte") {
  testsupport::Rng rng(29);
  for (int i = 0; i < 60; ++i) {
    auto program = testsupport::generate_mpi_program(rng, 1 + i % 20);
    auto example =
        strip_and_label(make_source_unit("p", "p", program.text),
                        NumberingMode::Bare);
    REQUIRE(example.labels.size() == program.call_names.size());
    REQUIRE(reinsert(example) == program.text);
  }
}
