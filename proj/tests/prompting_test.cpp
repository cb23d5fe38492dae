#include "qgen/prompting.hpp"

#include <algorithm>

#include "doctest.h"
#include "testutil.hpp"

using namespace qgen;
using qgen::test::golden;
using qgen::test::read_file;

namespace {

size_t count_occurrences(const std::string& text, const std::string& needle) {
  size_t count = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

Document doc(const std::string& id, const std::string& text) {
  Document d;
  d.id = id;
  d.text = text;
  return d;
}

// golden exemplars from the web-passage domain
const std::string kCardiac =
    "Premature Ventricular Contractions (PVCs, PVC) Medical Definition of Cardiac stress "
    "testing, exercise. Cardiac stress testing, exercise: The exercise cardiac stress testing "
    "(EST) is the most widely used cardiac (heart) screening test. The patient exercises on a "
    "treadmill according to a standardized protocol, with progressive increases in the speed "
    "and elevation of the treadmill (typically changing at three-minute intervals).";
const std::string kAmazon =
    "Amazon Customer Service Whatever the issue, you're going to want to get in touch with "
    "Amazon's customer service department. The easiest way to contact Amazon's customer "
    "service department is by using their toll-free phone number at 1-888-280-4331.";
const std::string kSolar =
    "Solar panels convert sunlight into electricity using photovoltaic cells. Excess power "
    "can be stored in batteries or fed back into the grid.";

// shopping-domain exemplars
const std::string kBackpack =
    "MOUNTAINTOP 40L Hiking Backpacks with Rain Cover for Women Men MOUNTAINTOP 40L Hiking "
    "Backpack, A must have for hiking, camping, traveling and cycling, helps you reach the "
    "most epic views the world has to offer";
const std::string kChair =
    "Office Chair Ergonomic Cheap Desk Chair Mesh Computer Chair Lumbar Support Modern "
    "Executive Adjustable Stool Rolling Swivel Chair for Back Pain, Black";
const std::string kVelvet =
    "Velvet Accent Chair with Gold Metal Legs, Emerald Green, Perfect for Living Room or "
    "Bedroom";

const RelevanceLabel kRel{"relevant", 1};
const RelevanceLabel kIrrel{"irrelevant", 0};

ExemplarSet golden_set(VariantKind kind, const std::string& field) {
  ExemplarSet set;
  set.variant = Variant{kind, {}, {}};
  set.instruction = default_instruction(set.variant.base_name(), field);
  return set;
}

ExemplarSet binary_pairwise_golden_set(VariantKind kind = VariantKind::Pairwise) {
  ExemplarSet set = golden_set(kind, "passage");
  set.exemplars.push_back({doc("e1", kCardiac),
                           {{kRel, "what is cardiac testing in medical terms"},
                            {kIrrel, "how soon exercise after heart stent"}}});
  set.exemplars.push_back({doc("e2", kAmazon),
                           {{kRel, "what is amazon phone number customer service"},
                            {kIrrel, "amex customer service phone number"}}});
  return set;
}

LabelSet shopping() { return LabelSet::shopping(); }

TemplateConfig product_templates() {
  TemplateConfig t;
  t.doc_field = "product";
  return t;
}

}  // namespace

TEST_CASE("build_exemplar_set composes 10 relevant-only exemplars") {
  auto examples = qgen::test::make_binary_exemplars();
  auto set = build_exemplar_set(examples, Variant::relevant_only(), LabelSet::binary());
  REQUIRE(set.exemplars.size() == 10);
  for (const auto& ex : set.exemplars) {
    REQUIRE(ex.entries.size() == 1);
    CHECK(ex.entries[0].first.name == "relevant");
  }
}

TEST_CASE("build_exemplar_set rejects 4/5 label-conditioned input") {
  auto examples = qgen::test::make_binary_exemplars();
  std::vector<LabeledExample> reduced;
  int rel_kept = 0;
  for (const auto& ex : examples) {
    if (ex.label.name == "relevant") {
      if (rel_kept == 4) continue;
      ++rel_kept;
    }
    reduced.push_back(ex);
  }
  try {
    build_exemplar_set(reduced, Variant::label_conditioned(), LabelSet::binary());
    FAIL("expected InsufficientExemplarsError");
  } catch (const InsufficientExemplarsError& e) {
    CHECK(e.label == "relevant");
  }
}

TEST_CASE("build_exemplar_set label-conditioned binary takes 5 per label alternating") {
  auto examples = qgen::test::make_binary_exemplars();
  auto set = build_exemplar_set(examples, Variant::label_conditioned(), LabelSet::binary());
  REQUIRE(set.exemplars.size() == 10);
  size_t rel = 0, irrel = 0;
  for (const auto& ex : set.exemplars) (ex.entries[0].first.name == "relevant" ? rel : irrel)++;
  CHECK(rel == 5);
  CHECK(irrel == 5);
  CHECK(set.exemplars[0].entries[0].first.name == "relevant");
  CHECK(set.exemplars[1].entries[0].first.name == "irrelevant");
}

TEST_CASE("build_exemplar_set pairwise pairs one relevant and one irrelevant per document") {
  auto examples = qgen::test::make_binary_exemplars();
  auto set = build_exemplar_set(examples, Variant::pairwise(), LabelSet::binary());
  REQUIRE(set.exemplars.size() == 10);
  for (const auto& ex : set.exemplars) {
    REQUIRE(ex.entries.size() == 2);
    CHECK(ex.entries[0].first.name == "relevant");
    CHECK(ex.entries[1].first.name == "irrelevant");
  }
}

TEST_CASE("fine-grained set missing a label is rejected naming the label") {
  LabelSet labels = shopping();
  // paired exemplars covering Exact/Substitute/Irrelevant but never Complement
  std::vector<LabeledExample> examples;
  int i = 0;
  for (auto [first, second] : std::vector<std::pair<const char*, const char*>>{
           {"Exact", "Substitute"}, {"Substitute", "Irrelevant"}, {"Exact", "Irrelevant"}}) {
    Document d = doc("p" + std::to_string(i), "product description " + std::to_string(i));
    ++i;
    examples.push_back({"first query " + std::to_string(i), d, *labels.find(first)});
    examples.push_back({"second query " + std::to_string(i), d, *labels.find(second)});
  }
  try {
    build_exemplar_set(examples, Variant::all_labels(), labels);
    FAIL("expected InsufficientExemplarsError");
  } catch (const InsufficientExemplarsError& e) {
    CHECK(e.label == "Complement");
  }
  try {
    build_exemplar_set(examples, Variant::pairwise_label_pair(labels.top(), labels.bottom()),
                       labels);
    FAIL("expected InsufficientExemplarsError");
  } catch (const InsufficientExemplarsError& e) {
    CHECK(e.label == "Complement");
  }
}

TEST_CASE("build_exemplar_set rejects labels outside the label set") {
  auto examples = qgen::test::make_binary_exemplars();
  examples.push_back({"query", doc("x", "text"), {"maybe", 5}});
  CHECK_THROWS_AS(build_exemplar_set(examples, Variant::relevant_only(), LabelSet::binary()),
                  WrongLabelSetError);
}

TEST_CASE("pairwise k=2 rendering satisfies the block-count oracle") {
  auto set = binary_pairwise_golden_set();
  TemplateConfig templates;
  auto prompt = render_generation_prompt(set, doc("t1", kSolar), templates);

  CHECK(count_occurrences(prompt.text, "passage:") == 3);
  CHECK(count_occurrences(prompt.text, "query1:") == 3);  // 2 answered + final cue
  CHECK(count_occurrences(prompt.text, "query2:") == 2);
  CHECK(prompt.text.ends_with("query1:"));
  CHECK(prompt.cue == "query1:");
  CHECK(prompt.target_doc_id == "t1");
  CHECK(count_occurrences(prompt.text, kSolar) == 1);
}

TEST_CASE("label-conditioned target block carries the label line") {
  ExemplarSet set = golden_set(VariantKind::LabelConditioned, "passage");
  set.exemplars.push_back(
      {doc("e1", kCardiac), {{kRel, "what is cardiac testing in medical terms"}}});
  TemplateConfig templates;
  auto prompt = render_generation_prompt(set, doc("t1", "short passage"), templates, kRel);
  CHECK(prompt.text.ends_with("passage: short passage\nlabel: relevant\nquery:"));
  CHECK(prompt.expected_parse.first->name == "relevant");

  CHECK_THROWS_AS(render_generation_prompt(set, doc("t1", "x"), templates), MissingLabelError);
}

TEST_CASE("k=0 renders instruction header plus target block only") {
  ExemplarSet set = golden_set(VariantKind::Pairwise, "passage");
  TemplateConfig templates;
  auto prompt = render_generation_prompt(set, doc("t1", "lone passage"), templates);
  CHECK(prompt.text ==
        default_instruction("pairwise", "passage") + "\n\npassage: lone passage\nquery1:");
}

TEST_CASE("rendering is a pure function") {
  auto set = binary_pairwise_golden_set();
  TemplateConfig templates;
  auto a = render_generation_prompt(set, doc("t1", kSolar), templates);
  auto b = render_generation_prompt(set, doc("t1", kSolar), templates);
  CHECK(a.text == b.text);
}

TEST_CASE("iterative stage-2 requires and embeds the prior query") {
  auto set = binary_pairwise_golden_set(VariantKind::IterativeStage2);
  TemplateConfig templates;
  CHECK_THROWS_AS(render_generation_prompt(set, doc("t1", kSolar), templates),
                  MissingPriorQueryError);
  auto prompt = render_generation_prompt(set, doc("t1", kSolar), templates, {},
                                         std::string("residential solar panel cost"));
  CHECK(prompt.text.ends_with("query1: residential solar panel cost\nquery2:"));
  CHECK(prompt.cue == "query2:");
}

TEST_CASE("documents are flattened to one line and truncation is reported") {
  ExemplarSet set = golden_set(VariantKind::RelevantOnly, "passage");
  TemplateConfig templates;
  templates.max_doc_chars = 40;
  auto prompt =
      render_generation_prompt(set, doc("t1", "line one\nline two\twide  gaps"), templates);
  CHECK(prompt.text.find("line one line two wide gaps") != std::string::npos);
  CHECK(prompt.truncations.empty());

  std::string long_text(100, 'x');
  auto truncated = render_generation_prompt(set, doc("t2", long_text), templates);
  REQUIRE(truncated.truncations.size() == 1);
  CHECK(truncated.truncations[0].doc_id == "t2");
  CHECK(truncated.truncations[0].original_chars == 100);
  CHECK(truncated.truncations[0].kept_chars == 40);
  CHECK(truncated.text.find(std::string(41, 'x')) == std::string::npos);
}

TEST_CASE("filter prompt renders k exemplar blocks and ends at the label cue") {
  auto examples = qgen::test::make_binary_exemplars();
  auto filter_set = build_filter_exemplar_set(examples, LabelSet::binary());
  REQUIRE(filter_set.exemplars.size() == 10);
  TemplateConfig templates;
  auto prompt = render_filter_prompt(filter_set, "some candidate query", doc("t1", kSolar),
                                     LabelSet::binary(), templates);
  CHECK(count_occurrences(prompt.text, "query:") == 11);
  CHECK(count_occurrences(prompt.text, "passage:") == 11);
  CHECK(count_occurrences(prompt.text, "label:") == 11);
  CHECK(prompt.text.ends_with("label:"));
  CHECK(prompt.is_filter);

  CHECK_THROWS_AS(
      render_filter_prompt(filter_set, "   ", doc("t1", kSolar), LabelSet::binary(), templates),
      MissingQueryError);
}

TEST_CASE("fine-grained filter instruction names all four labels") {
  std::string instruction = default_instruction("filter", "product");
  for (const char* name : {"Exact", "Substitute", "Complement", "Irrelevant"})
    CHECK(instruction.find(std::string("'") + name + "'") != std::string::npos);
}

TEST_CASE("template overrides replace the built-in instruction") {
  TemplateConfig templates;
  templates.instruction_overrides["pairwise"] = "Custom instruction.";
  auto examples = qgen::test::make_binary_exemplars();
  auto built = build_exemplar_set(examples, Variant::pairwise(), LabelSet::binary(), templates);
  CHECK(built.instruction == "Custom instruction.");
}

// ---- golden files ------------------------------------------------------------

TEST_CASE("golden: binary relevant-only") {
  ExemplarSet set = golden_set(VariantKind::RelevantOnly, "passage");
  set.exemplars.push_back(
      {doc("e1", kCardiac), {{kRel, "what is cardiac testing in medical terms"}}});
  set.exemplars.push_back(
      {doc("e2", kAmazon), {{kRel, "what is amazon phone number customer service"}}});
  TemplateConfig templates;
  auto prompt = render_generation_prompt(set, doc("t1", kSolar), templates);
  CHECK(prompt.text == read_file(golden("binary_relevant_only.txt")));
}

TEST_CASE("golden: binary label-conditioned") {
  ExemplarSet set = golden_set(VariantKind::LabelConditioned, "passage");
  set.exemplars.push_back(
      {doc("e1", kCardiac), {{kRel, "what is cardiac testing in medical terms"}}});
  set.exemplars.push_back({doc("e2", kAmazon), {{kIrrel, "amex customer service phone number"}}});
  TemplateConfig templates;
  auto prompt = render_generation_prompt(set, doc("t1", kSolar), templates, kRel);
  CHECK(prompt.text == read_file(golden("binary_label_conditioned.txt")));
}

TEST_CASE("golden: binary pairwise") {
  auto set = binary_pairwise_golden_set();
  TemplateConfig templates;
  auto prompt = render_generation_prompt(set, doc("t1", kSolar), templates);
  CHECK(prompt.text == read_file(golden("binary_pairwise.txt")));
}

TEST_CASE("golden: binary iterative stage-2") {
  auto set = binary_pairwise_golden_set(VariantKind::IterativeStage2);
  TemplateConfig templates;
  auto prompt = render_generation_prompt(set, doc("t1", kSolar), templates, {},
                                         std::string("residential solar panel cost"));
  CHECK(prompt.text == read_file(golden("binary_iterative_stage2.txt")));
}

TEST_CASE("golden: binary filter") {
  ExemplarSet set;
  set.variant = Variant::label_conditioned();
  set.instruction = default_instruction("filter", "passage");
  set.exemplars.push_back(
      {doc("e1", kCardiac), {{kRel, "what is cardiac testing in medical terms"}}});
  set.exemplars.push_back({doc("e2", kAmazon), {{kIrrel, "amex customer service phone number"}}});
  TemplateConfig templates;
  auto prompt = render_filter_prompt(set, "residential solar battery storage", doc("t1", kSolar),
                                     LabelSet::binary(), templates);
  CHECK(prompt.text == read_file(golden("binary_filter.txt")));
}

TEST_CASE("golden: fine-grained relevant-only") {
  LabelSet labels = shopping();
  ExemplarSet set = golden_set(VariantKind::RelevantOnly, "product");
  set.exemplars.push_back(
      {doc("p1", kBackpack), {{*labels.find("Exact"), "mountaintop hiking pack"}}});
  set.exemplars.push_back(
      {doc("p2", kChair), {{*labels.find("Exact"), "ergonomic mesh office chair black"}}});
  auto prompt = render_generation_prompt(set, doc("pt", kVelvet), product_templates());
  CHECK(prompt.text == read_file(golden("fine_relevant_only.txt")));
}

TEST_CASE("golden: fine-grained label-conditioned") {
  LabelSet labels = shopping();
  ExemplarSet set = golden_set(VariantKind::LabelConditioned, "product");
  set.exemplars.push_back(
      {doc("p1", kBackpack), {{*labels.find("Exact"), "mountaintop hiking pack"}}});
  set.exemplars.push_back(
      {doc("p2", kChair), {{*labels.find("Substitute"), "office chair without wheels or lift"}}});
  auto prompt = render_generation_prompt(set, doc("pt", kVelvet), product_templates(),
                                         *labels.find("Exact"));
  CHECK(prompt.text == read_file(golden("fine_label_conditioned.txt")));
}

TEST_CASE("golden: fine-grained pairwise label pair") {
  LabelSet labels = shopping();
  ExemplarSet set;
  set.variant = Variant::pairwise_label_pair(*labels.find("Exact"), *labels.find("Complement"));
  set.instruction = default_instruction("pairwise-pair", "product");
  set.exemplars.push_back({doc("p1", kBackpack),
                           {{*labels.find("Exact"), "mountaintop hiking pack"},
                            {*labels.find("Substitute"), "osprey jet 12"}}});
  set.exemplars.push_back({doc("p2", kChair),
                           {{*labels.find("Substitute"), "office chair without wheels or lift"},
                            {*labels.find("Complement"), "ergonimic foot stool"}}});
  auto prompt = render_generation_prompt(set, doc("pt", kVelvet), product_templates());
  CHECK(prompt.text == read_file(golden("fine_pairwise_pair.txt")));
  CHECK(
      prompt.text.ends_with("task: generate query1 for Exact and query2 for Complement\nquery1:"));
}

TEST_CASE("golden: fine-grained all-labels") {
  LabelSet labels = shopping();
  ExemplarSet set = golden_set(VariantKind::AllLabels, "product");
  set.exemplars.push_back({doc("p1", kBackpack),
                           {{*labels.find("Exact"), "mountaintop hiking pack"},
                            {*labels.find("Substitute"), "osprey jet 12"},
                            {*labels.find("Complement"), "waterproof shoes hiking"},
                            {*labels.find("Irrelevant"), "mountaintop whitlow"}}});
  set.exemplars.push_back({doc("p2", kChair),
                           {{*labels.find("Exact"), "ergonomic mesh office chair black"},
                            {*labels.find("Substitute"), "office chair without wheels or lift"},
                            {*labels.find("Complement"), "ergonimic foot stool"},
                            {*labels.find("Irrelevant"), "garden hose 50 ft"}}});
  auto prompt = render_generation_prompt(set, doc("pt", kVelvet), product_templates());
  CHECK(prompt.text == read_file(golden("fine_all_labels.txt")));
  CHECK(prompt.cue == "Label:");
}

TEST_CASE("golden: fine-grained filter") {
  LabelSet labels = shopping();
  ExemplarSet set;
  set.variant = Variant::label_conditioned();
  set.instruction = default_instruction("filter", "product");
  set.exemplars.push_back(
      {doc("p1", kBackpack), {{*labels.find("Exact"), "mountaintop hiking pack"}}});
  set.exemplars.push_back(
      {doc("p2", kChair), {{*labels.find("Substitute"), "office chair without wheels or lift"}}});
  set.exemplars.push_back(
      {doc("p1", kBackpack), {{*labels.find("Complement"), "waterproof shoes hiking"}}});
  set.exemplars.push_back(
      {doc("p2", kChair), {{*labels.find("Irrelevant"), "garden hose 50 ft"}}});
  auto prompt = render_filter_prompt(set, "emerald green velvet chair", doc("pt", kVelvet), labels,
                                     product_templates());
  CHECK(prompt.text == read_file(golden("fine_filter.txt")));
}

TEST_CASE("block count equals exemplar count for every variant") {
  auto examples = qgen::test::make_binary_exemplars();
  TemplateConfig templates;
  for (auto kind :
       {VariantKind::RelevantOnly, VariantKind::LabelConditioned, VariantKind::Pairwise}) {
    auto label = kind == VariantKind::LabelConditioned ? std::optional<RelevanceLabel>(kRel)
                                                       : std::nullopt;
    auto set = build_exemplar_set(examples, Variant{kind, {}, {}}, LabelSet::binary());
    auto prompt = render_generation_prompt(set, doc("t1", "target passage text"), templates, label);
    CHECK(count_occurrences(prompt.text, "passage:") == set.exemplars.size() + 1);
    CHECK(count_occurrences(prompt.text, "target passage text") == 1);
  }
}
