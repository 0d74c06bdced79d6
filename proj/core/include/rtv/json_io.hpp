#pragma once

#include <iosfwd>
#include <string>

#include "rtv/model.hpp"

namespace rtv {

/// Instance/catalog/solution file I/O. All writers are canonical: object
/// keys sorted, floats with 12 significant digits, so identical values
/// serialize to identical bytes.

/// Parse errors carry line/column context; invariant violations carry the
/// failing field (ValidationError).
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

TripCatalog load_catalog(const std::string& path, const Instance& inst);
void save_catalog(const TripCatalog& cat, const std::string& path);
std::string catalog_to_json(const TripCatalog& cat);
TripCatalog catalog_from_json(const std::string& text, const Instance& inst);

void save_assignment(const Assignment& a, const TripCatalog& cat,
                     const std::string& path);
std::string assignment_to_json(const Assignment& a, const TripCatalog& cat);

FractionalSolution load_fractional(const std::string& path);
void save_fractional(const FractionalSolution& x, const std::string& path);
std::string fractional_to_json(const FractionalSolution& x);
FractionalSolution fractional_from_json(const std::string& text);

/// Writes `text` to `path`, throwing std::runtime_error on I/O failure.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace rtv
