#pragma once

#include <string>
#include <vector>

#include "ppdcpp/dataset.hpp"

namespace ppdcpp::io {

struct CsvSchema {
  std::string response = "y";
  std::vector<std::string> covariates;  // column names, intercept excluded
};

// Header + numeric rows, comma separated, '.' decimal point, UTF-8, no
// locale handling. When covariates are declared, the dataset's design
// matrix gets an intercept column prepended. Parse failures name the data
// row (1-based) and column.
Dataset ingest_csv(const std::string& path, const CsvSchema& schema, DataRole role);

// Inverse of ingest_csv for the same schema; numbers round-trip exactly.
void write_dataset_csv(const std::string& path, const Dataset& data, const CsvSchema& schema);

// Generic numeric table writer used for curve and metric emissions.
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

std::string format_double(double v);  // shortest exact round-trip decimal

}  // namespace ppdcpp::io
