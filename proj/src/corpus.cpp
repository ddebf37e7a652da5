#include <geohub/corpus.hpp>

#include <algorithm>
#include <charconv>
#include <cstring>
#include <string>

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include <geohub/error.hpp>

namespace geohub {

std::vector<WeightedPoint> to_weighted_points(std::span<const CityAggregate> cities) {
    std::vector<WeightedPoint> out;
    out.reserve(cities.size());
    for (const auto& c : cities) out.push_back({c.point, static_cast<double>(c.weight)});
    return out;
}

std::int64_t total_weight(std::span<const CityAggregate> cities) {
    std::int64_t w = 0;
    for (const auto& c : cities) w += c.weight;
    return w;
}

// ---------------------------------------------------------------------------
// Region filters

namespace {

bool is_one_of(std::string_view code, std::initializer_list<std::string_view> codes) {
    return std::find(codes.begin(), codes.end(), code) != codes.end();
}

}  // namespace

RegionFilter RegionFilter::bbox(const BBox& box) {
    box.validate();
    RegionFilter f(Kind::kBBox);
    f.box_ = box;
    return f;
}

bool RegionFilter::accepts(const PublicationRecord& r) const {
    switch (kind_) {
        case Kind::kAll: return true;
        case Kind::kBBox: return box_->contains(r.point);
        case Kind::kLower48:
            return r.country == "US" && !is_one_of(r.admin1, {"AK", "HI", "PR", "GU", "VI", "AS", "MP", "UM"});
        case Kind::kMainlandChina: return r.country == "CN" && !is_one_of(r.admin1, {"HK", "MO", "TW"});
    }
    return false;
}

std::vector<PublicationRecord> filter_region(std::span<const PublicationRecord> records,
                                             const RegionFilter& filter) {
    std::vector<PublicationRecord> out;
    for (const auto& r : records)
        if (filter.accepts(r)) out.push_back(r);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

constexpr std::size_t kMissing = static_cast<std::size_t>(-1);

template <typename Fn>
void split_tabs(std::string_view line, Fn&& fn) {
    std::size_t start = 0;
    for (;;) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fn(line.substr(start));
            return;
        }
        fn(line.substr(start, tab - start));
        start = tab + 1;
    }
}

std::string_view chomp(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last && first != last;
}

}  // namespace

RecordParser::RecordParser(std::string_view header, const ColumnMapping& mapping) {
    std::vector<std::string_view> names;
    split_tabs(chomp(header), [&](std::string_view f) { names.push_back(f); });
    std::string missing;
    auto locate = [&](const std::string& name) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            missing += missing.empty() ? name : ", " + name;
            return kMissing;
        }
        const auto idx = static_cast<std::size_t>(it - names.begin());
        width_ = std::max(width_, idx + 1);
        return idx;
    };
    paper_id_ = locate(mapping.paper_id);
    year_ = locate(mapping.year);
    city_ = locate(mapping.city);
    admin1_ = locate(mapping.admin1);
    country_ = locate(mapping.country);
    lat_ = locate(mapping.lat);
    lon_ = locate(mapping.lon);
    if (!missing.empty()) throw GeoError(ErrorCode::kFatalFormat, "header is missing columns: " + missing);
}

bool RecordParser::parse(std::string_view line, PublicationRecord& out, std::string& reason) const {
    line = chomp(line);
    // Enough slots for the widest header we have seen in practice.
    std::string_view fields[64];
    std::vector<std::string_view> overflow;
    std::size_t n = 0;
    split_tabs(line, [&](std::string_view f) {
        if (n < std::size(fields))
            fields[n] = f;
        else
            overflow.push_back(f);
        ++n;
    });
    if (n < width_) {
        reason = "expected at least " + std::to_string(width_) + " fields, found " + std::to_string(n);
        return false;
    }
    auto field = [&](std::size_t i) { return i < std::size(fields) ? fields[i] : overflow[i - std::size(fields)]; };

    const std::string_view paper_id = field(paper_id_);
    if (paper_id.empty()) {
        reason = "empty paper_id";
        return false;
    }
    int year = 0;
    if (!parse_number(field(year_), year)) {
        reason = "unparsable year";
        return false;
    }
    if (year < 1800 || year > 2100) {
        reason = "year out of range";
        return false;
    }
    double lat = 0, lon = 0;
    if (!parse_number(field(lat_), lat) || !parse_number(field(lon_), lon)) {
        reason = "unparsable coordinate";
        return false;
    }
    const GeoPoint point{lat, lon};
    if (!point.valid()) {
        reason = "coordinate out of range";
        return false;
    }
    const std::string_view city = field(city_);
    const std::string_view admin1 = field(admin1_);
    const std::string_view country = field(country_);

    out.paper_id.assign(paper_id);
    out.year = year;
    out.city_key.clear();
    out.city_key.reserve(city.size() + admin1.size() + country.size() + 2);
    out.city_key.append(city).append(1, '|').append(admin1).append(1, '|').append(country);
    out.admin1.assign(admin1);
    out.country.assign(country);
    out.point = point;
    return true;
}

RecordReader::RecordReader(std::istream& in, const ColumnMapping& mapping) : in_(in) {
    if (!std::getline(in_, line_)) throw GeoError(ErrorCode::kFatalFormat, "missing header row");
    parser_.emplace(line_, mapping);
}

std::optional<PublicationRecord> RecordReader::next() {
    PublicationRecord rec;
    std::string reason;
    while (std::getline(in_, line_)) {
        ++line_no_;
        if (parser_->parse(line_, rec, reason)) {
            ++records_;
            return rec;
        }
        rejects_.push_back({line_no_, std::move(reason)});
        reason.clear();
    }
    return std::nullopt;
}

std::vector<PublicationRecord> parse_records(std::istream& in, const ColumnMapping& mapping,
                                             std::vector<Reject>* rejects) {
    RecordReader reader(in, mapping);
    std::vector<PublicationRecord> out;
    while (auto rec = reader.next()) out.push_back(std::move(*rec));
    if (rejects) *rejects = reader.rejects();
    return out;
}

void write_reject_report(std::ostream& out, std::span<const Reject> rejects) {
    out << "line_no\treason\n";
    for (const auto& r : rejects) out << r.line_no << '\t' << r.reason << '\n';
}

// ---------------------------------------------------------------------------
// Deduplication

struct PaperCityDeduper::Impl {
    absl::flat_hash_map<std::string, std::uint32_t> city_ids;
    absl::flat_hash_set<std::string> seen;
    std::string key;
};

PaperCityDeduper::PaperCityDeduper() : impl_(std::make_unique<Impl>()) {}
PaperCityDeduper::~PaperCityDeduper() = default;
PaperCityDeduper::PaperCityDeduper(PaperCityDeduper&&) noexcept = default;
PaperCityDeduper& PaperCityDeduper::operator=(PaperCityDeduper&&) noexcept = default;

bool PaperCityDeduper::admit(const PublicationRecord& r) {
    // City keys repeat heavily; interning them keeps the composite key short.
    const auto next_id = static_cast<std::uint32_t>(impl_->city_ids.size());
    const std::uint32_t city_id = impl_->city_ids.try_emplace(r.city_key, next_id).first->second;
    std::string& key = impl_->key;
    key.assign(r.paper_id);
    char raw[sizeof(city_id)];
    std::memcpy(raw, &city_id, sizeof(city_id));
    key.append(raw, sizeof(raw));
    return impl_->seen.insert(key).second;
}

std::size_t PaperCityDeduper::size() const noexcept { return impl_->seen.size(); }

std::vector<PublicationRecord> dedupe_paper_city(std::span<const PublicationRecord> records) {
    PaperCityDeduper dedup;
    std::vector<PublicationRecord> out;
    for (const auto& r : records)
        if (dedup.admit(r)) out.push_back(r);
    return out;
}

// ---------------------------------------------------------------------------
// Aggregation

namespace {

struct CityEntry {
    GeoPoint representative;
    double lat_lo, lat_hi, lon_lo, lon_hi;
    std::int64_t weight = 0;

    explicit CityEntry(const GeoPoint& p)
        : representative(p), lat_lo(p.lat), lat_hi(p.lat), lon_lo(p.lon), lon_hi(p.lon) {}

    void absorb(const CityEntry& o, const std::string& key) {
        const GeoPoint& p = o.representative;
        if (std::tie(p.lat, p.lon) < std::tie(representative.lat, representative.lon)) representative = p;
        lat_lo = std::min(lat_lo, o.lat_lo);
        lat_hi = std::max(lat_hi, o.lat_hi);
        lon_lo = std::min(lon_lo, o.lon_lo);
        lon_hi = std::max(lon_hi, o.lon_hi);
        weight += o.weight;
        if (lat_hi - lat_lo > kGeocodeConflictDegrees || lon_hi - lon_lo > kGeocodeConflictDegrees)
            throw GeoError(ErrorCode::kGeocodeConflict, "city '" + key + "' has conflicting geocodes");
    }
};

}  // namespace

struct CityAggregator::Impl {
    std::optional<YearRange> years;
    absl::flat_hash_map<std::string, CityEntry> cities;
    std::int64_t total = 0;
};

CityAggregator::CityAggregator(std::optional<YearRange> years) : impl_(std::make_unique<Impl>()) {
    impl_->years = years;
}
CityAggregator::~CityAggregator() = default;
CityAggregator::CityAggregator(CityAggregator&&) noexcept = default;
CityAggregator& CityAggregator::operator=(CityAggregator&&) noexcept = default;

bool CityAggregator::add(const PublicationRecord& r) {
    if (impl_->years && !impl_->years->contains(r.year)) return false;
    CityEntry single(r.point);
    single.weight = 1;
    auto it = impl_->cities.try_emplace(r.city_key, r.point).first;
    it->second.absorb(single, it->first);
    ++impl_->total;
    return true;
}

void CityAggregator::merge(const CityAggregator& other) {
    for (const auto& [key, entry] : other.impl_->cities) {
        auto it = impl_->cities.try_emplace(key, entry.representative).first;
        it->second.absorb(entry, key);
    }
    impl_->total += other.impl_->total;
}

std::int64_t CityAggregator::total() const noexcept { return impl_->total; }

std::vector<CityAggregate> CityAggregator::cities() const {
    std::vector<CityAggregate> out;
    out.reserve(impl_->cities.size());
    for (const auto& [key, entry] : impl_->cities) out.push_back({key, entry.representative, entry.weight});
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.city_key < b.city_key; });
    return out;
}

std::vector<CityAggregate> aggregate_cities(std::span<const PublicationRecord> records,
                                            std::optional<YearRange> years) {
    CityAggregator agg(years);
    for (const auto& r : records) agg.add(r);
    return agg.cities();
}

}  // namespace geohub
