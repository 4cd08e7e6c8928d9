"""Shared fixtures: a hand-written corpus plus synthetic environments."""

import pytest

from agentarena import (
    FixtureWeb,
    ScriptedAgent,
    SimulatedExaminerChat,
    build_tree,
    fixture_labeler,
    ladder_profiles,
)

# A small hand-written corpus with every structural feature the tree builder
# has to cope with: a dead search hit, a thin page that cannot be a root, a
# redirect, unlabeled links, and a depth-3 tail for expansion tests.
HANDHELD_CORPUS = {
    "search": {
        "vintage synthesizers": [
            "https://dead.example.org/gone",
            "https://synth.example.org/hub",
            "https://synth.example.org/alt",
        ],
    },
    "pages": {
        "https://synth.example.org/hub": {
            "title": "Synth archive hub",
            "body": "A chronology of analog and digital synthesizers, "
                    "from modular cabinets to pocket groove boxes.",
            "links": [
                {"anchor": "Modular era", "url": "https://synth.example.org/era/1",
                 "relation": "era", "context": "The patch-cable years."},
                {"anchor": "Polyphonic era", "url": "https://synth.example.org/era/2",
                 "relation": "era", "context": "Chips made chords affordable."},
                {"anchor": "Digital era", "url": "https://synth.example.org/era/3",
                 "relation": "era", "context": "Operators replace oscillators."},
                {"anchor": "Designer A", "url": "https://synth.example.org/fig/a",
                 "relation": "person", "context": "A noted circuit designer."},
                {"anchor": "Designer B", "url": "https://synth.example.org/fig/b",
                 "relation": "person", "context": "A noted interface designer."},
                {"anchor": "Notes", "url": "https://synth.example.org/misc",
                 "context": "Assorted archive notes."},
            ],
        },
        "https://synth.example.org/era/1": {
            "title": "Modular era overview",
            "body": "Patchable cabinets. attribute fact-e1-a0. attribute fact-e1-a1.",
            "links": [
                {"anchor": "Model one", "url": "https://synth.example.org/era/1/m1",
                 "relation": "model", "context": "Flagship modular cabinet."},
                {"anchor": "Model two", "url": "https://synth.example.org/era/1/m2",
                 "relation": "model", "context": "Portable patch suitcase."},
            ],
        },
        "https://synth.example.org/era/2": {
            "title": "Polyphonic era overview",
            "body": "Chord machines. attribute fact-e2-a0. attribute fact-e2-a1.",
            "links": [
                {"anchor": "Model three", "url": "https://synth.example.org/era/2/m3",
                 "relation": "model", "context": "Five-voice classic."},
                {"anchor": "Model four", "url": "https://synth.example.org/era/2/m4",
                 "relation": "model", "context": "Eight-voice flagship."},
            ],
        },
        "https://synth.example.org/era/3": {
            "title": "Digital era overview",
            "body": "Operator stacks. attribute fact-e3-a0. attribute fact-e3-a1.",
            "links": [
                {"anchor": "Model five", "url": "https://synth.example.org/era/3/m5",
                 "relation": "model", "context": "Six-operator standard."},
            ],
        },
        "https://synth.example.org/era/1/m1": {
            "title": "Model one page",
            "body": "Entity M1. attribute fact-m1-a0. attribute fact-m1-a1.",
            "links": [
                {"anchor": "Spec sheet 1", "url": "https://synth.example.org/era/1/m1/s1",
                 "relation": "spec", "context": "Oscillator counts."},
                {"anchor": "Spec sheet 2", "url": "https://synth.example.org/era/1/m1/s2",
                 "relation": "spec", "context": "Filter slopes."},
            ],
        },
        "https://synth.example.org/era/1/m2": {
            "title": "Model two page",
            "body": "Entity M2. attribute fact-m2-a0. attribute fact-m2-a1.",
            "links": [],
        },
        "https://synth.example.org/era/2/m3": {
            "title": "Model three page",
            "body": "Entity M3. attribute fact-m3-a0. attribute fact-m3-a1.",
            "links": [],
        },
        "https://synth.example.org/era/2/m4": {
            "title": "Model four page",
            "body": "Entity M4. attribute fact-m4-a0. attribute fact-m4-a1.",
            "links": [],
        },
        "https://synth.example.org/era/3/m5": {
            "title": "Model five page",
            "body": "Entity M5. attribute fact-m5-a0. attribute fact-m5-a1.",
            "links": [],
        },
        "https://synth.example.org/era/1/m1/s1": {
            "title": "Spec sheet one",
            "body": "Entity S1. attribute fact-s1-a0. attribute fact-s1-a1.",
            "links": [],
        },
        "https://synth.example.org/era/1/m1/s2": {
            "title": "Spec sheet two",
            "body": "Entity S2. attribute fact-s2-a0. attribute fact-s2-a1.",
            "links": [],
        },
        "https://synth.example.org/old": {
            "redirect": "https://synth.example.org/hub",
        },
        "https://synth.example.org/alt": {
            "title": "Alt landing",
            "body": "Thin page with little to offer.",
            "links": [
                {"anchor": "Hub", "url": "https://synth.example.org/hub"},
                {"anchor": "Notes", "url": "https://synth.example.org/misc"},
            ],
        },
        "https://synth.example.org/misc": {
            "title": "Archive notes",
            "body": "Assorted notes. attribute fact-mi-a0. attribute fact-mi-a1.",
            "links": [],
        },
        "https://synth.example.org/fig/a": {
            "title": "Designer A page",
            "body": "Entity FA. attribute fact-fa-a0. attribute fact-fa-a1.",
            "links": [],
        },
        "https://synth.example.org/fig/b": {
            "title": "Designer B page",
            "body": "Entity FB. attribute fact-fb-a0. attribute fact-fb-a1.",
            "links": [],
        },
    },
}


@pytest.fixture
def handheld_web():
    return FixtureWeb(HANDHELD_CORPUS)


@pytest.fixture
def handheld_tree(handheld_web):
    return build_tree("vintage synthesizers", handheld_web, handheld_web,
                      budget=20, labeler=fixture_labeler(handheld_web))


@pytest.fixture
def examiner():
    return SimulatedExaminerChat()


@pytest.fixture
def ladder_agents():
    return [ScriptedAgent(p) for p in ladder_profiles(6)]
