"""Services fuer hj-reinit."""
