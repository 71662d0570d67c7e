#pragma once

// Deterministic program generators for property-style tests. The single
// purpose generator plants whole-line, single-line MPI statements at a
// uniform indent so strip/reinsert round trips are byte-exact; the rich
// generator produces messier code for the anonymizer and dedup suites.

#include <random>
#include <string>
#include <vector>

namespace testsupport {

using Rng = std::mt19937_64;

struct GeneratedProgram {
  std::string text;
  std::vector<std::string> call_names;  // in source order
};

inline const std::vector<std::pair<std::string, std::string>>&
call_templates() {
  // name, full single-line statement
  static const std::vector<std::pair<std::string, std::string>> kCalls = {
      {"MPI_Comm_rank", "MPI_Comm_rank(MPI_COMM_WORLD, &rank);"},
      {"MPI_Comm_size", "MPI_Comm_size(MPI_COMM_WORLD, &size);"},
      {"MPI_Send", "MPI_Send(buf, 64, MPI_DOUBLE, 1, tag, MPI_COMM_WORLD);"},
      {"MPI_Recv",
       "MPI_Recv(buf, 64, MPI_DOUBLE, 0, tag, MPI_COMM_WORLD, &status);"},
      {"MPI_Bcast", "MPI_Bcast(buf, 64, MPI_DOUBLE, 0, MPI_COMM_WORLD);"},
      {"MPI_Reduce",
       "MPI_Reduce(buf, out, 64, MPI_DOUBLE, MPI_SUM, 0, MPI_COMM_WORLD);"},
      {"MPI_Barrier", "MPI_Barrier(MPI_COMM_WORLD);"},
  };
  return kCalls;
}

inline const std::vector<std::string>& filler_statements() {
  static const std::vector<std::string> kFillers = {
      "sum = sum * 0.5 + 1.0;",
      "tag = tag + 1;",
      "if (rank > 0) { tag = tag - 1; }",
      "for (int i = 0; i < 64; ++i) { buf[i] = i + sum; }",
      "// layout notes; MPI_Send(fake, call) stays a comment",
      "note = \"mentions MPI_Recv( but only in text\";",
      "out[0] = buf[0] + 2;",
  };
  return kFillers;
}

// A compilable-looking MPI program with exactly n_calls whole-line MPI
// statements. With init_finalize and n_calls >= 2 the first is MPI_Init and
// the last MPI_Finalize, matching the corpus filter.
inline GeneratedProgram generate_mpi_program(Rng& rng, int n_calls,
                                             bool init_finalize = true) {
  GeneratedProgram out;
  std::vector<std::string> body;

  auto pick = [&rng](const auto& pool) -> const auto& {
    std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
    return pool[d(rng)];
  };
  auto coin = [&rng](double p) {
    return std::uniform_real_distribution<>(0.0, 1.0)(rng) < p;
  };

  for (int k = 0; k < n_calls; ++k) {
    std::string name, stmt;
    if (init_finalize && n_calls >= 2 && k == 0) {
      name = "MPI_Init";
      stmt = "MPI_Init(&argc, &argv);";
    } else if (init_finalize && n_calls >= 2 && k == n_calls - 1) {
      name = "MPI_Finalize";
      stmt = "MPI_Finalize();";
    } else {
      const auto& t = pick(call_templates());
      name = t.first;
      stmt = t.second;
    }
    out.call_names.push_back(name);

    if (k > 0 && coin(0.3)) body.push_back("");
    int fillers = static_cast<int>(rng() % 3);
    for (int f = 0; f < fillers; ++f)
      body.push_back("    " + pick(filler_statements()));
    body.push_back("    " + stmt);
  }
  if (coin(0.5)) body.push_back("    " + pick(filler_statements()));

  std::string text;
  text += "#include <mpi.h>\n";
  text += "#include <stdio.h>\n";
  text += "\n";
  text += "int main(int argc, char** argv)\n";
  text += "{\n";
  text += "    int rank = 0, size = 1, tag = 7;\n";
  text += "    double sum = 0.0, buf[64], out[64];\n";
  text += "    MPI_Status status;\n";
  text += "    const char* note = \"plain\";\n";
  for (const auto& line : body) {
    text += line;
    text += '\n';
  }
  text += "    return 0;\n";
  text += "}\n";
  out.text = text;
  return out;
}

// Messier code for anonymizer and dedup tests: typedefs, a struct tag, a
// helper function, hex and float literals, strings, and repeated
// identifiers. Still lexes cleanly.
inline std::string generate_rich_program(Rng& rng) {
  auto coin = [&rng](double p) {
    return std::uniform_real_distribution<>(0.0, 1.0)(rng) < p;
  };
  std::uniform_int_distribution<int> small(0, 900);

  const std::vector<std::string> names = {"alpha", "beta",  "gamma", "delta",
                                          "omega", "count", "value", "accum"};
  auto pick_name = [&]() { return names[rng() % names.size()]; };

  std::string a = pick_name(), b = pick_name(), c = pick_name();
  std::string text;
  text += "#include <mpi.h>\n";
  if (coin(0.3)) text += "#define BASE_TAG " + std::to_string(small(rng)) + "\n";
  text += "\n";
  if (coin(0.5))
    text += "typedef struct grid_cell { double w; double h; } grid_cell;\n";
  text += "static double scale_" + a + "(double v) { return v * 2.5; }\n";
  text += "\n";
  text += "int main(int argc, char** argv)\n";
  text += "{\n";
  text += "    int " + a + " = " + std::to_string(small(rng)) + ", " + b +
          " = 0x" + std::to_string(10 + small(rng) % 80) + ";\n";
  text += "    double " + c + " = " + std::to_string(small(rng)) + "." +
          std::to_string(small(rng) % 10) + ";\n";
  text += "    double grid[16];\n";
  if (coin(0.6)) text += "    const char* tagline = \"run " + a + "\";\n";
  text += "    MPI_Init(&argc, &argv);\n";
  text += "    MPI_Comm_rank(MPI_COMM_WORLD, &" + a + ");\n";
  text += "    MPI_Comm_size(MPI_COMM_WORLD, &" + b + ");\n";
  if (coin(0.5)) text += "    /* " + c + " is reused below */\n";
  text += "    " + c + " = scale_" + a + "(" + c + ") + " + a + ";\n";
  text += "    grid[0] = " + c + ";\n";
  if (coin(0.5))
    text += "    MPI_Bcast(grid, 16, MPI_DOUBLE, 0, MPI_COMM_WORLD);\n";
  if (coin(0.4))
    text += "    MPI_Reduce(grid, grid, 16, MPI_DOUBLE, MPI_SUM, 0, "
            "MPI_COMM_WORLD);\n";
  text += "    MPI_Finalize();\n";
  text += "    return " + std::to_string(small(rng) % 2) + ";\n";
  text += "}\n";
  return text;
}

}  // namespace testsupport
