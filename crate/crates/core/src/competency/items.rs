//! The competency table: every item with its input-knowledge tags and the
//! levels that require it.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    ProblemSolving,
    BasicIct,
    Design,
    Formulas,
    Formatting,
}

/// Knowledge brought in from outside spreadsheets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Knowledge {
    /// Mathematics.
    MA,
    /// Design and planning.
    DP,
    /// Incremental nature of science.
    IS,
    /// Authentic contents.
    AC,
    ICT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CompetencyItem {
    pub id: &'static str,
    pub group: Group,
    pub name: &'static str,
    pub input_knowledge: &'static [Knowledge],
    pub bu_required: bool,
    pub gu_required: bool,
    /// Whether a formula can show this item.
    pub evaluable: bool,
}

impl CompetencyItem {
    /// Required of general users only.
    pub fn gu_only(&self) -> bool {
        self.gu_required && !self.bu_required
    }
}

use Group::*;
use Knowledge::*;

const fn item(
    id: &'static str,
    group: Group,
    name: &'static str,
    input_knowledge: &'static [Knowledge],
    bu_required: bool,
    evaluable: bool,
) -> CompetencyItem {
    CompetencyItem {
        id,
        group,
        name,
        input_knowledge,
        bu_required,
        gu_required: true,
        evaluable,
    }
}

pub const BASIC_ARITHMETIC: &str = "basic-arithmetic";
pub const CONCEPT_OF_FUNCTIONS: &str = "concept-of-functions";
pub const NON_ARRAY_FUNCTIONS: &str = "non-array-functions";
pub const VECTOR_OUTPUT: &str = "vector-output-array-formulas";
pub const ONE_VALUE_OUTPUT: &str = "one-value-output-array-formulas";
pub const CONDITION_FUNCTIONS: &str = "array-error-condition-functions";
pub const COMPOSITE_2_3: &str = "composite-2-3-level";
pub const COMPOSITE_MULTI: &str = "composite-multi-level";
pub const ERROR_RESISTANT: &str = "error-resistant-formulas";

pub static ITEMS: &[CompetencyItem] = &[
    item("breaking-down-problems", ProblemSolving, "Breaking down and researching problems", &[MA, DP, IS, AC], true, false),
    item("tracing-errors", ProblemSolving, "Tracing errors in spreadsheets they build", &[MA, ICT, IS, AC], true, false),
    item(ERROR_RESISTANT, ProblemSolving, "Building error-resistant formulas", &[MA, ICT], true, true),
    item("manual-vs-automatic-calculation", ProblemSolving, "Understanding manual vs automatic calculation", &[ICT, MA, IS, AC], true, false),
    item("recognizing-error-messages", ProblemSolving, "Recognizing error messages", &[ICT, MA, IS, AC], true, false),
    item("data-entering-errors", ProblemSolving, "Handling data-entering error messages", &[ICT, MA, AC], true, false),
    item("formula-entering-errors", ProblemSolving, "Handling formula-entering error messages", &[MA, AC], true, false),
    item("data-driven-errors", ProblemSolving, "Handling data-driven error messages", &[AC], false, false),
    item("recognizing-data-types", ProblemSolving, "Recognizing data types", &[ICT], true, false),
    item("analysing-data-manually", ProblemSolving, "Analysing data manually", &[MA, ICT], true, false),
    item("accessing-saving-files", BasicIct, "Accessing and saving files", &[ICT], true, false),
    item("reading-entering-data", BasicIct, "Reading and entering data", &[ICT], true, false),
    item("set-up-printing", BasicIct, "Manipulating set up and printing", &[ICT], true, false),
    item("naming-files", BasicIct, "Naming files", &[ICT], true, false),
    item("converting-files", BasicIct, "Converting files with Save As", &[ICT], true, false),
    item("find-replace", BasicIct, "Managing find and replace processes", &[ICT], true, false),
    item("navigation-shortcuts", BasicIct, "Understanding and applying navigation shortcuts", &[ICT], true, false),
    item("copy-move-shortcuts", BasicIct, "Understanding and applying copy and move shortcuts", &[ICT], true, false),
    item("file-management-shortcuts", BasicIct, "Understanding and applying file management shortcuts", &[ICT], true, false),
    item("designing-layout", Design, "Designing layout", &[DP, ICT, AC], true, false),
    item("explaining-calculations", Design, "Explaining calculations they build", &[ICT, MA, AC], true, false),
    item(BASIC_ARITHMETIC, Formulas, "Understanding and applying basic arithmetic", &[MA], true, true),
    item(CONCEPT_OF_FUNCTIONS, Formulas, "Understanding the concept of functions", &[MA, ICT], true, true),
    item(NON_ARRAY_FUNCTIONS, Formulas, "Calling non-array-based general purpose functions", &[], true, true),
    item("handling-vectors", Formulas, "Understanding and handling vectors", &[], true, false),
    item(VECTOR_OUTPUT, Formulas, "Building vector output array formulas", &[], true, true),
    item(ONE_VALUE_OUTPUT, Formulas, "Building one value output array formulas", &[], true, true),
    item(CONDITION_FUNCTIONS, Formulas, "Calling array-, error-, and condition-based general purpose functions", &[], false, true),
    item(COMPOSITE_2_3, Formulas, "Building 2 and 3-level composite functions", &[], true, true),
    item(COMPOSITE_MULTI, Formulas, "Building multi-level composite functions", &[], false, true),
    item("precedent-dependent-cells", Formulas, "Understanding precedent and dependent cells", &[], true, false),
    item("hiding-inserting", Formatting, "Understanding and applying hiding, unhiding, deleting, inserting rows, columns, cells", &[ICT], true, false),
    item("grouping-merging", Formatting, "Understanding and applying grouping, merging", &[ICT], false, false),
    item("cell-formatting", Formatting, "Understanding and applying regular cell formatting", &[ICT], true, false),
];

pub fn item_by_id(id: &str) -> Option<&'static CompetencyItem> {
    ITEMS.iter().find(|i| i.id == id)
}
