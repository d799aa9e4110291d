"""examforge: a memory-augmented agent engine for national-exam mathematics prep.

The package models a three-section exam blueprint (multiple choice,
multi-part true/false, short answer), generates and grades exams against
it, and drives the generation/solving/tutoring agents with an episodic
case memory whose retrieval policy is learned online via kernel episodic
control.
"""

__version__ = "0.1.0"
