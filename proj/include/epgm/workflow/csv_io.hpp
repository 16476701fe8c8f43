#pragma once

// CSV interchange for EPGM databases. A dataset directory holds
//
//   labels.csv    optional; one `label` column fixing the label order
//   vertices.csv  id,label,<key>:<type>...
//   edges.csv     id,source,target,label[,index],<key>:<type>...
//   graphs.csv    optional; id,label,vertices,edges,<key>:<type>...
//
// Types are string, int, float and bool; an untyped column is a string. An
// unquoted empty cell means the property is absent, a quoted empty cell is
// the empty string. Graph member lists are space separated ids.

#include <filesystem>
#include <string>
#include <vector>

#include "epgm/model.hpp"

namespace epgm::workflow {

class ImportError : public Error {
 public:
  using Error::Error;
};

struct CsvField {
  std::string text;
  bool quoted = false;
};

using CsvRow = std::vector<CsvField>;

/// RFC 4180 records; quoted fields may span lines. Throws ImportError on an
/// unterminated quote.
std::vector<CsvRow> parse_csv(std::string_view text, const std::string& file = "csv");

EpgmDatabase read_csv_database(const std::filesystem::path& dir);
/// Writes labels, vertices, edges and graphs files. Throws ImportError when a
/// property key carries values of different types.
void write_csv_database(const EpgmDatabase& db, const std::filesystem::path& dir);

}  // namespace epgm::workflow
