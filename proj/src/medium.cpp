#include "gdfl/error.hpp"
#include "gdfl/types.hpp"

namespace gdfl {

CommMedium ingest_medium(MediumKind kind) {
  switch (kind) {
    case MediumKind::WiredElectrical: return {kind, 8.0e-11};
    case MediumKind::OpticalFiber: return {kind, 3.52e-14};
    case MediumKind::Mobile4G5G: return {kind, 3.33e-8};
    case MediumKind::WiFi: return {kind, 5.51e-4};
    case MediumKind::Custom:
      fail(ErrorKind::InvalidArgs, "custom medium requires an explicit energy_per_byte");
  }
  fail(ErrorKind::UnknownMedium, "unrecognized medium kind");
}

MediumKind parse_medium_kind(const std::string& name) {
  if (name == "wired" || name == "wired_electrical") return MediumKind::WiredElectrical;
  if (name == "optical" || name == "optical_fiber") return MediumKind::OpticalFiber;
  if (name == "mobile" || name == "mobile_4g5g") return MediumKind::Mobile4G5G;
  if (name == "wifi") return MediumKind::WiFi;
  if (name == "custom") return MediumKind::Custom;
  fail(ErrorKind::UnknownMedium, "unknown communication medium: " + name);
}

const char* medium_name(MediumKind kind) {
  switch (kind) {
    case MediumKind::WiredElectrical: return "wired";
    case MediumKind::OpticalFiber: return "optical";
    case MediumKind::Mobile4G5G: return "mobile";
    case MediumKind::WiFi: return "wifi";
    case MediumKind::Custom: return "custom";
  }
  return "unknown";
}

}  // namespace gdfl
