#include "massimo/ingest.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>
#include <vector>

#include <json.hpp>
#include <rapidjson/error/en.h>
#include <rapidjson/memorystream.h>
#include <rapidjson/reader.h>

namespace massimo {

namespace {

std::string keypoint_label(int id, std::size_t k)
{
  return "person " + std::to_string(id) + " keypoint " + std::to_string(k);
}

// Streams the document straight into a PoseFrame. Unknown keys are skipped
// whole; every schema violation throws SchemaError as soon as it is seen.
class FrameBuilder : public rapidjson::BaseReaderHandler<rapidjson::UTF8<>, FrameBuilder> {
 public:
  PoseFrame frame;

  bool Null() { return scalar(Scalar{}); }
  bool Bool(bool) { return scalar(Scalar{}); }
  bool Int(int v) { return scalar(number(v, true, v)); }
  bool Uint(unsigned v) { return scalar(number(v, v <= INT_MAX, static_cast<int>(v))); }
  bool Int64(std::int64_t v) { return scalar(number(static_cast<double>(v), false, 0)); }
  bool Uint64(std::uint64_t v) { return scalar(number(static_cast<double>(v), false, 0)); }
  bool Double(double v) { return scalar(number(v, false, 0)); }
  bool String(const char* str, rapidjson::SizeType len, bool)
  {
    Scalar s;
    s.kind = Scalar::Text;
    s.text = std::string_view(str, len);
    return scalar(s);
  }

  bool Key(const char* str, rapidjson::SizeType len, bool)
  {
    const std::string_view key(str, len);
    slot_ = Slot::Skip;
    switch (ctx_.back()) {
      case Ctx::Root:
        if (key == "image") slot_ = Slot::Image;
        if (key == "people") slot_ = Slot::People;
        break;
      case Ctx::Image:
        if (key == "path") slot_ = Slot::Path;
        if (key == "width") slot_ = Slot::Width;
        if (key == "height") slot_ = Slot::Height;
        break;
      case Ctx::Person:
        if (key == "id") slot_ = Slot::Id;
        if (key == "keypoints") slot_ = Slot::Keypoints;
        break;
      default:
        break;
    }
    return true;
  }

  bool StartObject() { return open(true); }
  bool StartArray() { return open(false); }
  bool EndObject(rapidjson::SizeType) { return close(); }
  bool EndArray(rapidjson::SizeType) { return close(); }

 private:
  enum class Ctx { Start, Root, Image, People, Person, Keypoints, Triple, Skip };
  enum class Slot { None, Skip, Image, People, Path, Width, Height, Id, Keypoints };

  struct Scalar {
    enum Kind { Other, Text, Number } kind = Other;
    double num = 0.0;
    bool is_int = false;
    int ival = 0;
    std::string_view text;
  };

  static Scalar number(double v, bool is_int, int ival)
  {
    Scalar s;
    s.kind = Scalar::Number;
    s.num = v;
    s.is_int = is_int;
    s.ival = ival;
    return s;
  }

  std::string where() const { return "people[" + std::to_string(frame.people.size()) + "]"; }

  std::string person_label() const
  {
    return has_id_ ? "person " + std::to_string(person_.id) : where();
  }

  std::string keypoints_error() const
  {
    return person_label() + ": expected " + std::to_string(kKeypointCount) + " keypoints";
  }

  // Checks one value against the current context. `scalar_value` is null when
  // a container opens, in which case `push` receives the context to enter.
  void expect_value(const Scalar* scalar_value, bool object, Ctx* push)
  {
    const bool is_container = scalar_value == nullptr;
    switch (ctx_.back()) {
      case Ctx::Start:
        if (!is_container || !object) throw SchemaError("document: expected an object");
        *push = Ctx::Root;
        return;
      case Ctx::Skip:
        if (is_container) *push = Ctx::Skip;
        return;
      case Ctx::Root:
      case Ctx::Image:
      case Ctx::Person:
        break;
      case Ctx::People:
        if (!is_container || !object) throw SchemaError(where() + ": expected an object");
        person_ = PersonPose{};
        has_id_ = has_keypoints_ = false;
        kp_count_ = 0;
        *push = Ctx::Person;
        return;
      case Ctx::Keypoints:
        if (kp_count_ >= kKeypointCount) throw SchemaError(keypoints_error());
        if (!is_container || object)
          throw SchemaError(keypoint_label(person_.id, kp_count_) + ": expected [x, y, conf]");
        triple_count_ = 0;
        *push = Ctx::Triple;
        return;
      case Ctx::Triple:
        if (triple_count_ >= 3)
          throw SchemaError(keypoint_label(person_.id, kp_count_) + ": expected [x, y, conf]");
        if (is_container || scalar_value->kind != Scalar::Number)
          throw SchemaError(keypoint_label(person_.id, kp_count_) + ": expected a number");
        triple_[triple_count_++] = scalar_value->num;
        return;
    }

    const Slot slot = slot_;
    slot_ = Slot::None;
    switch (slot) {
      case Slot::None:
      case Slot::Skip:
        if (is_container) *push = Ctx::Skip;
        return;
      case Slot::Image:
        if (!is_container || !object) throw SchemaError("image: expected an object");
        has_image_ = true;
        *push = Ctx::Image;
        return;
      case Slot::People:
        if (!is_container || object) throw SchemaError("people: expected an array");
        has_people_ = true;
        *push = Ctx::People;
        return;
      case Slot::Path:
        if (is_container || scalar_value->kind != Scalar::Text)
          throw SchemaError("image.path: expected a string");
        frame.image_path = std::string(scalar_value->text);
        has_path_ = true;
        return;
      case Slot::Width:
      case Slot::Height: {
        const char* name = slot == Slot::Width ? "image.width" : "image.height";
        if (is_container || !scalar_value->is_int) throw SchemaError(std::string(name) + ": expected an integer");
        (slot == Slot::Width ? frame.width : frame.height) = scalar_value->ival;
        (slot == Slot::Width ? has_width_ : has_height_) = true;
        return;
      }
      case Slot::Id:
        if (is_container || !scalar_value->is_int) throw SchemaError(where() + ".id: expected an integer");
        person_.id = scalar_value->ival;
        if (person_.id < 0) throw SchemaError(where() + ": id must be non-negative");
        has_id_ = true;
        return;
      case Slot::Keypoints:
        if (!is_container || object) throw SchemaError(keypoints_error());
        has_keypoints_ = true;
        *push = Ctx::Keypoints;
        return;
    }
  }

  bool scalar(const Scalar& value)
  {
    Ctx unused = Ctx::Skip;
    expect_value(&value, false, &unused);
    return true;
  }

  bool open(bool object)
  {
    Ctx push = Ctx::Skip;
    expect_value(nullptr, object, &push);
    ctx_.push_back(push);
    return true;
  }

  bool close()
  {
    const Ctx done = ctx_.back();
    ctx_.pop_back();
    switch (done) {
      case Ctx::Root:
        if (!has_image_) throw SchemaError("document: missing \"image\"");
        if (!has_people_) throw SchemaError("document: missing \"people\"");
        break;
      case Ctx::Image:
        if (!has_path_) throw SchemaError("image: missing \"path\"");
        if (!has_width_) throw SchemaError("image: missing \"width\"");
        if (!has_height_) throw SchemaError("image: missing \"height\"");
        if (frame.width <= 0 || frame.height <= 0)
          throw SchemaError("image: width and height must be positive");
        break;
      case Ctx::Person:
        if (!has_id_) throw SchemaError(where() + ": missing \"id\"");
        if (!has_keypoints_) throw SchemaError(where() + ": missing \"keypoints\"");
        if (!seen_.insert(person_.id).second)
          throw SchemaError("person " + std::to_string(person_.id) + ": duplicate id");
        frame.people.push_back(person_);
        break;
      case Ctx::Keypoints:
        if (kp_count_ != kKeypointCount) throw SchemaError(keypoints_error());
        break;
      case Ctx::Triple: {
        if (triple_count_ != 3)
          throw SchemaError(keypoint_label(person_.id, kp_count_) + ": expected [x, y, conf]");
        Keypoint& kp = person_.keypoints[kp_count_];
        kp = {triple_[0], triple_[1], triple_[2]};
        if (!(kp.confidence >= 0.0 && kp.confidence <= 1.0))
          throw SchemaError(keypoint_label(person_.id, kp_count_) + ": confidence outside [0,1]");
        ++kp_count_;
        break;
      }
      default:
        break;
    }
    return true;
  }

  std::vector<Ctx> ctx_{Ctx::Start};
  Slot slot_ = Slot::None;
  bool has_image_ = false, has_people_ = false;
  bool has_path_ = false, has_width_ = false, has_height_ = false;
  PersonPose person_;
  bool has_id_ = false, has_keypoints_ = false;
  std::size_t kp_count_ = 0;
  double triple_[3] = {};
  int triple_count_ = 0;
  std::unordered_set<int> seen_;
};

}  // namespace

PoseFrame parse_keypoint_file(std::string_view bytes, Warnings* warnings)
{
  FrameBuilder builder;
  rapidjson::Reader reader;
  rapidjson::MemoryStream stream(bytes.data(), bytes.size());
  if (reader.Parse<rapidjson::kParseFullPrecisionFlag>(stream, builder).IsError()) {
    const std::size_t byte = reader.GetErrorOffset();
    throw ParseError("malformed keypoint JSON at byte " + std::to_string(byte) + ": " +
                         rapidjson::GetParseError_En(reader.GetParseErrorCode()),
                     byte);
  }
  PoseFrame frame = std::move(builder.frame);

  // Clamping needs the image size, which may follow "people" in the document.
  for (auto& person : frame.people) {
    for (std::size_t k = 0; k < kKeypointCount; ++k) {
      Keypoint& kp = person.keypoints[k];
      if (!(kp.confidence > 0.0)) continue;
      const double cx = std::clamp(kp.x, 0.0, static_cast<double>(frame.width));
      const double cy = std::clamp(kp.y, 0.0, static_cast<double>(frame.height));
      if (cx == kp.x && cy == kp.y) continue;
      std::ostringstream msg;
      msg << keypoint_label(person.id, k) << ": (" << kp.x << ", " << kp.y << ") outside image, clamped";
      warn(warnings, msg.str());
      kp.x = cx;
      kp.y = cy;
    }
  }
  return frame;
}

PoseFrame load_keypoint_file(const std::filesystem::path& path, Warnings* warnings)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open keypoint file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_keypoint_file(buf.str(), warnings);
}

std::string serialize_keypoint_file(const PoseFrame& frame)
{
  nlohmann::ordered_json doc;
  doc["image"] = {{"path", frame.image_path}, {"width", frame.width}, {"height", frame.height}};
  auto people = nlohmann::ordered_json::array();
  for (const auto& person : frame.people) {
    auto kpts = nlohmann::ordered_json::array();
    for (const auto& kp : person.keypoints) kpts.push_back({kp.x, kp.y, kp.confidence});
    people.push_back({{"id", person.id}, {"keypoints", std::move(kpts)}});
  }
  doc["people"] = std::move(people);
  return doc.dump();
}

std::vector<QueuePoint> hip_midpoints(const PoseFrame& frame, double conf_threshold,
                                      Warnings* warnings)
{
  std::vector<QueuePoint> out;
  out.reserve(frame.people.size());
  auto usable = [&](const Keypoint& kp) {
    return kp.confidence >= conf_threshold && !kp.is_sentinel();
  };

  for (const auto& person : frame.people) {
    const Keypoint& left = person.keypoints[kLeftHip];
    const Keypoint& right = person.keypoints[kRightHip];
    const bool l = usable(left);
    const bool r = usable(right);
    const std::string who = "person " + std::to_string(person.id);
    if (l && r) {
      out.push_back({person.id, (left.x + right.x) / 2.0, (left.y + right.y) / 2.0});
    } else if (l || r) {
      const Keypoint& hip = l ? left : right;
      out.push_back({person.id, hip.x, hip.y});
      warn(warnings, who + ": single-hip fallback");
    } else {
      warn(warnings, who + ": no usable hip keypoints, omitted");
    }
  }
  return out;
}

std::vector<QueuePoint> order_queue(std::vector<QueuePoint> points)
{
  if (points.size() < 2) return points;

  // Canonical order first so the covariance (and therefore the axis) does not
  // depend on the input permutation down to the last bit.
  auto canonical = [](const QueuePoint& a, const QueuePoint& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.person_id < b.person_id;
  };
  std::sort(points.begin(), points.end(), canonical);

  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double dx = p.x - mx;
    const double dy = p.y - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }

  // Major-axis angle of the 2x2 covariance.
  const double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  double ax = std::cos(angle);
  double ay = std::sin(angle);
  if (std::abs(ax) >= std::abs(ay) ? ax < 0.0 : ay < 0.0) {
    ax = -ax;
    ay = -ay;
  }

  struct Keyed {
    double proj;
    QueuePoint point;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(points.size());
  for (const auto& p : points) keyed.push_back({(p.x - mx) * ax + (p.y - my) * ay, p});
  std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.proj != b.proj) return a.proj < b.proj;
    if (a.point.y != b.point.y) return a.point.y < b.point.y;
    return a.point.person_id < b.point.person_id;
  });

  for (std::size_t i = 0; i < keyed.size(); ++i) points[i] = keyed[i].point;
  return points;
}

}  // namespace massimo
