import os
import unittest
from tempfile import TemporaryDirectory

import constants
from model.data import DataFile, ModelFile, data_digest, load_data, load_model, load_table, save
from model.sur import DataValidationError, apply_scaling
from tests.utils import data_path, model_path


class TestData(unittest.TestCase):
    def test_load_model(self):
        model = load_model(model_path("monotone_restricted"))
        pattern = model.to_pattern()
        self.assertEqual((pattern.R, pattern.C), (2, 2))
        self.assertEqual(pattern.nparams, 2)
        self.assertEqual(pattern.variable_names(), ["b11", "b22"])
        self.assertEqual(ModelFile.from_pattern(pattern), model)
        self.assertEqual(model.label(), "{(1,1),(2,1),(2,2)} b11=b21")

    def test_load_data(self):
        data = load_data(data_path("purely_real")).to_dataset()
        self.assertEqual((data.R, data.C, data.N), (2, 2, 5))
        self.assertEqual(str(data.X[0][0]), "-13/20")

    def test_data_roundtrip_through_file(self):
        data = load_data(data_path("purely_real")).to_dataset()
        with TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "data.json")
            save(DataFile.from_dataset(data), path)
            self.assertEqual(load_data(path).to_dataset(), data)

    def test_digest(self):
        data = load_data(data_path("multimodal")).to_dataset()
        digest = data_digest(data)
        self.assertEqual(len(digest), 64)
        self.assertEqual(digest, data_digest(load_data(data_path("multimodal")).to_dataset()))
        self.assertNotEqual(digest, data_digest(apply_scaling(data, 2)))

    def test_tables(self):
        gensur = load_table(constants.GENSUR_TABLE)
        self.assertEqual(gensur.name, "gensur")
        self.assertEqual(
            [(row.dimension, row.degree) for row in gensur.rows],
            [(0, 5), (0, 9), (0, 29), (1, 4), (1, 8), (1, 32), (2, 80)],
        )
        submodels = load_table(constants.SUBMODEL_TABLE)
        self.assertEqual(
            [(row.dimension, row.degree) for row in submodels.rows],
            [(0, 3), (0, 7), (0, 11), (0, 11), (0, 23), (0, 63)],
        )
        for row in gensur.rows + submodels.rows:
            row.model.to_pattern()

    def test_invalid_files(self):
        with TemporaryDirectory() as tmpdir:
            broken = os.path.join(tmpdir, "broken.json")
            with open(broken, "w") as f:
                f.write("{not json")
            with self.assertRaises(DataValidationError):
                load_model(broken)

            missing_field = os.path.join(tmpdir, "missing.json")
            with open(missing_field, "w") as f:
                f.write('{"R": 2, "C": 2}')
            with self.assertRaises(DataValidationError):
                load_model(missing_field)

            extra_field = os.path.join(tmpdir, "extra.json")
            with open(extra_field, "w") as f:
                f.write('{"X": [["1"]], "Y": [["2"]], "Z": []}')
            with self.assertRaises(DataValidationError):
                load_data(extra_field)

    def test_invalid_values(self):
        with self.assertRaises(DataValidationError):
            DataFile(X=[["1", "2", "x"]], Y=[["1", "0", "1"]]).to_dataset()


if __name__ == "__main__":
    unittest.main()
