#pragma once

#include <string>
#include <variant>
#include <vector>

#include "qcflow/plane_field.hpp"

namespace qcflow {

struct UnknownCatalogEntry : Error {
    explicit UnknownCatalogEntry(const std::string& name)
        : Error("unknown catalog entry '" + name + "'") {}
};

using CatalogObject = std::variant<VectorField, PlaneFieldDef>;

/// Built-in examples.  Parameterized names: identity(n), constant(ei,n),
/// linear(a,b;c,d), coords(k,n).
CatalogObject load_catalog(const std::string& name);

/// Convenience accessors that throw if the entry has the other kind.
VectorField load_catalog_field(const std::string& name);
PlaneFieldDef load_catalog_plane(const std::string& name);

struct CatalogListing {
    std::string name;
    std::string description;
    bool plane_field = false;
};
std::vector<CatalogListing> list_catalog();

}  // namespace qcflow
