#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "migratekit/c_frontend.hpp"

namespace migratekit {

enum class CatalogKind { type, macro_const, variable, extern_fn };

std::string to_string(CatalogKind kind);
CatalogKind catalog_kind_from_string(const std::string& s);

/// Where a Rust item came from. The catalog only holds generated, translated
/// or manual items; fallback marks rule-based substitutes during repair.
enum class Provenance { translated, catalog, fallback, manual, generated };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct CatalogEntry {
    std::string name;  // Rust-side name (struct tags lose their keyword)
    CatalogKind kind = CatalogKind::type;
    std::string rust_text;
    Provenance provenance = Provenance::generated;
};

/// Rust items mirroring C-side definitions, looked up by name during probing.
class ContextCatalog {
public:
    /// Throws ConfigError when the text does not parse as Rust items or the
    /// (name, kind) pair is already present.
    void add(CatalogEntry entry);
    /// Every entry with this name, in kind order type, macro-const, variable,
    /// extern-fn.
    std::vector<const CatalogEntry*> lookup(const std::string& name) const;
    const std::vector<CatalogEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    static ContextCatalog load(const std::filesystem::path& path);
    static ContextCatalog from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void save(const std::filesystem::path& path) const;

private:
    std::vector<CatalogEntry> entries_;
};

struct SkippedDecl {
    std::string name;
    std::string file;
    int line = 0;
    std::string reason;
};

/// Binding generation for the mini-C subset: tagged types become repr(C)
/// structs and unions, typedefs type aliases, enums integer aliases plus
/// constants, object macros constants, globals statics and prototypes extern
/// blocks. Declarations it cannot express are listed in `skipped`.
ContextCatalog generate_catalog(const ModuleIR& module, std::vector<SkippedDecl>* skipped = nullptr);

}  // namespace migratekit
