// Converts the fixed-width national-records table into the results CSV.
// usage: normalize_records <table.txt> <out.csv>

#include <fstream>
#include <iostream>

#include "record_edge/ingest.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: normalize_records <table.txt> <out.csv>\n";
    return 2;
  }
  std::ifstream in(argv[1]);
  if (!in) {
    std::cerr << "error: cannot open '" << argv[1] << "'\n";
    return 2;
  }
  try {
    const auto rows = record_edge::read_national_records(in);
    std::ofstream out(argv[2], std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << argv[2] << "'\n";
      return 2;
    }
    record_edge::write_results_csv(out, rows);
  } catch (const record_edge::ParseError& e) {
    std::cerr << "error: " << argv[1] << ":" << e.line() << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
