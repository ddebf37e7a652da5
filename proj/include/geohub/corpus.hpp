#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <geohub/geodesy.hpp>

namespace geohub {

struct PublicationRecord {
    std::string paper_id;
    int year = 0;
    std::string city_key;  // "city|admin1|country"
    std::string admin1;
    std::string country;
    GeoPoint point;
};

struct CityAggregate {
    std::string city_key;
    GeoPoint point;
    std::int64_t weight = 0;
};

std::vector<WeightedPoint> to_weighted_points(std::span<const CityAggregate> cities);
std::int64_t total_weight(std::span<const CityAggregate> cities);

struct YearRange {
    int first = 1800;
    int last = 2100;

    bool contains(int year) const noexcept { return year >= first && year <= last; }
};

class RegionFilter {
public:
    enum class Kind { kLower48, kMainlandChina, kBBox, kAll };

    static RegionFilter lower48() { return RegionFilter(Kind::kLower48); }
    static RegionFilter mainland_china() { return RegionFilter(Kind::kMainlandChina); }
    static RegionFilter all() { return RegionFilter(Kind::kAll); }
    /// Throws kInvalidBBox for an ill-ordered box.
    static RegionFilter bbox(const BBox& box);

    Kind kind() const noexcept { return kind_; }
    const std::optional<BBox>& box() const noexcept { return box_; }

    bool accepts(const PublicationRecord& r) const;

private:
    explicit RegionFilter(Kind kind) : kind_(kind) {}

    Kind kind_;
    std::optional<BBox> box_;
};

/// Header names for each logical input column.
struct ColumnMapping {
    std::string paper_id = "paper_id";
    std::string year = "year";
    std::string city = "city";
    std::string admin1 = "admin1";
    std::string country = "country";
    std::string lat = "lat";
    std::string lon = "lon";
};

struct Reject {
    std::size_t line_no = 0;
    std::string reason;
};

/// Parses data lines of a tab-separated extract once the header is known.
class RecordParser {
public:
    /// Throws kFatalFormat when a mapped column is missing from `header`.
    explicit RecordParser(std::string_view header, const ColumnMapping& mapping = {});

    /// Fills `out` and returns true, or stores a reason and returns false.
    bool parse(std::string_view line, PublicationRecord& out, std::string& reason) const;

private:
    std::size_t paper_id_, year_, city_, admin1_, country_, lat_, lon_;
    std::size_t width_ = 0;
};

/// Streams records from a TSV source with a header row. Malformed lines are
/// diverted to a reject tally keyed by their 1-based line number.
class RecordReader {
public:
    /// Throws kFatalFormat when the header is absent or incomplete.
    explicit RecordReader(std::istream& in, const ColumnMapping& mapping = {});

    std::optional<PublicationRecord> next();

    const std::vector<Reject>& rejects() const noexcept { return rejects_; }
    std::size_t records_read() const noexcept { return records_; }

private:
    std::istream& in_;
    std::optional<RecordParser> parser_;
    std::string line_;
    std::size_t line_no_ = 1;
    std::size_t records_ = 0;
    std::vector<Reject> rejects_;
};

std::vector<PublicationRecord> parse_records(std::istream& in, const ColumnMapping& mapping = {},
                                             std::vector<Reject>* rejects = nullptr);

/// Writes "line_no\treason" rows under a header.
void write_reject_report(std::ostream& out, std::span<const Reject> rejects);

/// Keeps the first record for each (paper_id, city_key) pair.
class PaperCityDeduper {
public:
    PaperCityDeduper();
    ~PaperCityDeduper();
    PaperCityDeduper(PaperCityDeduper&&) noexcept;
    PaperCityDeduper& operator=(PaperCityDeduper&&) noexcept;

    /// True the first time a (paper_id, city_key) pair is seen.
    bool admit(const PublicationRecord& r);
    std::size_t size() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::vector<PublicationRecord> dedupe_paper_city(std::span<const PublicationRecord> records);

std::vector<PublicationRecord> filter_region(std::span<const PublicationRecord> records,
                                             const RegionFilter& filter);

/// Incremental city table. Mergeable, and the result does not depend on the
/// order records were added.
class CityAggregator {
public:
    explicit CityAggregator(std::optional<YearRange> years = std::nullopt);
    ~CityAggregator();
    CityAggregator(CityAggregator&&) noexcept;
    CityAggregator& operator=(CityAggregator&&) noexcept;

    /// Returns false when the record falls outside the year window.
    /// Throws kGeocodeConflict.
    bool add(const PublicationRecord& r);
    void merge(const CityAggregator& other);

    std::int64_t total() const noexcept;
    /// Sorted by city_key.
    std::vector<CityAggregate> cities() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

inline constexpr double kGeocodeConflictDegrees = 1e-6;

std::vector<CityAggregate> aggregate_cities(std::span<const PublicationRecord> records,
                                            std::optional<YearRange> years = std::nullopt);

}  // namespace geohub
