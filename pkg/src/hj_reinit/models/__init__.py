"""Datenmodelle fuer hj-reinit."""
