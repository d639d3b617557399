from scaffolder.states import (
    ACTIONS,
    ACTION_INDEX,
    GROUND_TRUTH_ACTION,
    STATE_FOR_ACTION,
    STATE_INDEX,
    STATES,
    Action,
    CapacityClass,
    CognitiveState,
    GazeClass,
    HesitationType,
    NegationType,
    ObservationTriple,
    TaskClass,
    all_observation_triples,
)


def test_exactly_six_actions():
    assert len(ACTIONS) == 6
    assert len(set(ACTIONS)) == 6
    for action in ACTIONS:
        assert isinstance(action.negation, NegationType)
        assert isinstance(action.hesitation, HesitationType)


def test_exactly_six_states():
    assert len(STATES) == 6
    assert set(STATES) == set(CognitiveState)


def test_ground_truth_actions_match_state_labels():
    expected = {
        CognitiveState.ENGAGED_OBSERVER: Action(NegationType.AFFIRMATION, HesitationType.NONE),
        CognitiveState.ENGAGED_MISINTERPRETER: Action(
            NegationType.NEGATION_AFFIRMATION, HesitationType.NONE
        ),
        CognitiveState.DISTRACTED_MISINTERPRETER: Action(
            NegationType.NEGATION, HesitationType.NONE
        ),
        CognitiveState.OVERWHELMED_STRUGGLER: Action(
            NegationType.AFFIRMATION, HesitationType.HESITATION
        ),
        CognitiveState.UNFOCUSED: Action(
            NegationType.NEGATION_AFFIRMATION, HesitationType.HESITATION
        ),
        CognitiveState.UNCERTAIN: Action(NegationType.NEGATION, HesitationType.HESITATION),
    }
    assert GROUND_TRUTH_ACTION == expected


def test_state_for_action_inverts_ground_truth():
    for state, action in GROUND_TRUTH_ACTION.items():
        assert STATE_FOR_ACTION[action] is state
    assert len(STATE_FOR_ACTION) == 6


def test_action_labels_round_trip():
    for action in ACTIONS:
        assert Action.from_label(action.label) == action
    assert Action.from_label("negation_affirmation+hesitation") == Action(
        NegationType.NEGATION_AFFIRMATION, HesitationType.HESITATION
    )


def test_indices_are_consistent():
    for index, action in enumerate(ACTIONS):
        assert ACTION_INDEX[action] == index
    for index, state in enumerate(STATES):
        assert STATE_INDEX[state] == index


def test_thirty_distinct_observation_triples():
    triples = all_observation_triples()
    assert len(triples) == 30
    assert len(set(triples)) == 30
    assert len(CapacityClass) * len(GazeClass) * len(TaskClass) == 30


def test_triple_labels():
    triple = ObservationTriple(CapacityClass.HIGH, GazeClass.FOCUSED, TaskClass.SUCCESS)
    assert triple.as_labels() == ("high", "focused", "success")
