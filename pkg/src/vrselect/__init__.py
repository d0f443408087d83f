"""Multimodal 3D object selection engine with a study trial harness."""

from .nlu import (
    AmbiguousCommand,
    CommandInterpretation,
    EntityKind,
    EntitySpan,
    Intent,
    IntentPrediction,
    Lexicon,
    TokenStream,
    default_lexicon,
    extract_entities,
    classify_intent,
    interpret,
    normalize,
)
from .scene import (
    ColorKind,
    GenerationOverflow,
    PerplexityLevel,
    PickResult,
    Ray,
    Scene,
    SceneObject,
    ShapeKind,
    generate_scene,
    occluded_set,
    palette_for,
    raycast,
    serialize_scene,
)
from .selection import (
    EventKind,
    PanelModel,
    SelectionEvent,
    SelectionState,
    apply_ray,
    apply_speech,
    confirm,
    panel_view,
)
from .minimap import (
    CapacityExceeded,
    MinimapConfig,
    MinimapIcon,
    MinimapLayout,
    expand_overlaps,
    pick_from_minimap,
    project,
)
from .harness import (
    ConditionSummary,
    Outcome,
    StudyPlan,
    Technique,
    TrialPhaseKind,
    TrialRecord,
    TrialSpec,
    build_plan,
    filter_outliers,
    summarize,
)
from .replay import ScriptAction, ScriptDesync, build_auto_script, replay_script

__version__ = "0.1.0"
