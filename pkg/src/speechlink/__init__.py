"""Link speech-recognition transcripts to a knowledge graph."""
