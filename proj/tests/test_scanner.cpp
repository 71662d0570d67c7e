#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <string>
#include <vector>

#include "mpict/scanner.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

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

std::vector<MpiCallSite> extract(const std::string& text,
                                 Diagnostics* diags = nullptr) {
  return extract_mpi_calls(std::string_view(text), diags);
}

}  // namespace

TEST_CASE("the pi-program excerpt yields four sites at the figure's lines") {
  auto sites = extract(read_all(data_file("fig1a_excerpt.c")));
  REQUIRE(sites.size() == 4);
  CHECK(sites[0].start_line == 6);
  CHECK(sites[0].function_name == "MPI_Init");
  CHECK(sites[1].start_line == 7);
  CHECK(sites[1].function_name == "MPI_Comm_size");
  CHECK(sites[2].start_line == 8);
  CHECK(sites[2].function_name == "MPI_Comm_rank");
  CHECK(sites[3].start_line == 12);
  CHECK(sites[3].function_name == "MPI_Bcast");
  for (const auto& site : sites) CHECK(site.form == StatementForm::BareCall);
  CHECK(sites[3].args == std::vector<std::string>{"&n", "1", "MPI_INT", "0",
                                                  "MPI_COMM_WORLD"});
}

TEST_CASE("source without MPI identifiers yields no sites") {
  CHECK(extract("int main() { return compute(1, 2); }\n").empty());
}

TEST_CASE("MPI constants without a call are not sites") {
  CHECK(extract("MPI_Comm world = MPI_COMM_WORLD;\n").empty());
}

TEST_CASE("a two-line assigned-return call spans lines and keeps arguments") {
  const std::string text =
      "int rc;\n"
      "rc = MPI_Send(buf,\n"
      "  1, MPI_INT, 1, 0, MPI_COMM_WORLD);\n";
  auto sites = extract(text);
  REQUIRE(sites.size() == 1);
  const auto& site = sites[0];
  CHECK(site.form == StatementForm::AssignedReturn);
  CHECK(site.start_line == 2);
  CHECK(site.end_line == 3);
  CHECK(site.args == std::vector<std::string>{"buf", "1", "MPI_INT", "1", "0",
                                              "MPI_COMM_WORLD"});
  // independent character-level check of the captured argument list
  auto naive = testsupport::naive_split_args(
      "buf,\n  1, MPI_INT, 1, 0, MPI_COMM_WORLD");
  REQUIRE(naive.size() == site.args.size());
  CHECK(normalize_whitespace(naive[0]) == site.args[0]);
}

TEST_CASE("statement forms are classified") {
  SECTION("declaration initializer is assigned-return, statement starts at the type") {
    auto sites = extract("int main() {\nint rc = MPI_Send(a, b);\n}\n");
    REQUIRE(sites.size() == 1);
    CHECK(sites[0].form == StatementForm::AssignedReturn);
    CHECK(sites[0].full_text == "int rc = MPI_Send(a, b);");
  }
  SECTION("call inside a condition is embedded") {
    auto sites = extract("if (MPI_Init(&argc, &argv) != 0) { fail(); }\n");
    REQUIRE(sites.size() == 1);
    CHECK(sites[0].form == StatementForm::Embedded);
  }
  SECTION("call in a larger expression is embedded") {
    auto sites = extract("rc = MPI_Send(a, b) + 1;\n");
    REQUIRE(sites.size() == 1);
    CHECK(sites[0].form == StatementForm::Embedded);
  }
  SECTION("returned call is embedded") {
    auto sites = extract("int f() { return MPI_Finalize(); }\n");
    REQUIRE(sites.size() == 1);
    CHECK(sites[0].form == StatementForm::Embedded);
  }
  SECTION("assignment inside a return is embedded") {
    auto sites = extract("int f() { return rc = MPI_Finalize(); }\n");
    REQUIRE(sites.size() == 1);
    CHECK(sites[0].form == StatementForm::Embedded);
  }
  SECTION("case-labelled call is a bare call") {
    auto sites = extract("switch (k) { case 1: MPI_Barrier(c); break; }\n");
    REQUIRE(sites.size() == 1);
    CHECK(sites[0].form == StatementForm::BareCall);
  }
  SECTION("ternary branches are embedded") {
    auto sites = extract("x = ok ? MPI_Wtime() : MPI_Wtick();\n");
    REQUIRE(sites.size() == 2);
    CHECK(sites[0].form == StatementForm::Embedded);
    CHECK(sites[1].form == StatementForm::Embedded);
  }
  SECTION("nested calls produce an outer statement and an embedded inner") {
    auto sites = extract("MPI_Send(buf, MPI_Comm_rank(c, &r), t);\n");
    REQUIRE(sites.size() == 2);
    CHECK(sites[0].function_name == "MPI_Send");
    CHECK(sites[0].form == StatementForm::BareCall);
    CHECK(sites[1].function_name == "MPI_Comm_rank");
    CHECK(sites[1].form == StatementForm::Embedded);
  }
}

TEST_CASE("an argument list left open at end of file drops the site") {
  Diagnostics diags;
  auto sites = extract("MPI_Send(a, b", &diags);
  CHECK(sites.empty());
  CHECK(diags.count("unbalanced-call") == 1);
}

TEST_CASE("two calls on one line are ordered by column") {
  auto sites = extract("MPI_Comm_rank(c, &r); MPI_Comm_size(c, &s);\n");
  REQUIRE(sites.size() == 2);
  CHECK(sites[0].function_name == "MPI_Comm_rank");
  CHECK(sites[1].function_name == "MPI_Comm_size");
  CHECK(sites[0].column < sites[1].column);
}

TEST_CASE("extraction matches a character-level oracle on generated programs") {
  testsupport::Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    auto program = testsupport::generate_mpi_program(rng, 1 + i % 20);
    auto sites = extract(program.text);
    auto naive = testsupport::naive_scan_calls(program.text);
    REQUIRE(sites.size() == naive.size());
    for (std::size_t k = 0; k < sites.size(); ++k) {
      CHECK(sites[k].function_name == naive[k].name);
      CHECK(sites[k].start_line == naive[k].line);
    }
  }
}

TEST_CASE("calls wrapped in comments or strings are ignored") {
  const std::string text =
      "// MPI_Send(a, b);\n"
      "/* MPI_Recv(c, d); */\n"
      "const char* s = \"MPI_Bcast(e)\";\n"
      "MPI_Barrier(world);\n";
  auto sites = extract(text);
  REQUIRE(sites.size() == 1);
  CHECK(sites[0].function_name == "MPI_Barrier");
}

TEST_CASE("split_arguments handles the figure's broadcast call") {
  CHECK(split_arguments("&n, 1, MPI_INT, 0, MPI_COMM_WORLD") ==
        std::vector<std::string>{"&n", "1", "MPI_INT", "0", "MPI_COMM_WORLD"});
}

TEST_CASE("split_arguments on empty input") {
  CHECK(split_arguments("").empty());
  CHECK(split_arguments("   ").empty());
}

TEST_CASE("split_arguments keeps nested commas intact") {
  CHECK(split_arguments("f(a,b), (char*)x, arr[i,0]") ==
        std::vector<std::string>{"f(a,b)", "(char*)x", "arr[i,0]"});
}

TEST_CASE("split_arguments ignores commas inside literals and comments") {
  CHECK(split_arguments("\"a,b\", 'x', 1 /* no, split */, 2") ==
        std::vector<std::string>{"\"a,b\"", "'x'", "1 /* no, split */", "2"});
}

TEST_CASE("split_arguments agrees with a naive depth counter") {
  testsupport::Rng rng(23);
  const std::vector<std::string> pieces = {
      "a",      "f(x,y)", "g[1,2]",  "(int)z", "\"s,t\"",
      "&value", "arr[i]", "b + c*d", "h(k(l))"};
  for (int round = 0; round < 60; ++round) {
    std::string text;
    const int n = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
      if (i) text += ", ";
      text += pieces[rng() % pieces.size()];
    }
    CAPTURE(text);
    CHECK(split_arguments(text) == testsupport::naive_split_args(text));
  }
}

TEST_CASE("joined arguments reproduce the list up to whitespace") {
  const std::string arg_text = "buf,  1 ,MPI_INT,\n  0, MPI_COMM_WORLD";
  auto args = split_arguments(arg_text);
  std::string joined;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) joined += ", ";
    joined += args[i];
  }
  CHECK(normalize_whitespace(joined) ==
        normalize_whitespace("buf, 1, MPI_INT, 0, MPI_COMM_WORLD"));
}

TEST_CASE("parse_call reads the name and arguments out of a statement") {
  auto call = parse_call("int rc = MPI_Send(buf, 1, MPI_INT, 1, 0, comm);");
  REQUIRE(call.has_value());
  CHECK(call->function_name == "MPI_Send");
  CHECK(call->args.size() == 6);
  CHECK_FALSE(parse_call("no call here").has_value());
}
