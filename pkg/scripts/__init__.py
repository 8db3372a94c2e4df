# Scripts
